#ifndef CAVTUN_GRID_HPP
#define CAVTUN_GRID_HPP

#include <Eigen/Dense>
#include <vector>

#include "cavtun/state.hpp"

namespace cavtun {

// Independent validation path: the external problem is solved exactly on a
// spatial grid instead of being reduced to the ground doublet, so every
// two-level prediction can be checked against it.

// Quartic double well V(x) = A x^4 - B x^2 (hbar = 1) on a uniform grid
// with both endpoints included, spacing dx = (x_max - x_min)/(points - 1).
struct DoubleWellSpec {
  double quartic = 0.08;  // A > 0
  double quadratic = 1.0; // B > 0
  double mass = 1.0;
  double x_min = -8.0;
  double x_max = 8.0;
  int points = 1024;
  int retained_states = 8; // eigenpairs kept by solve_double_well
};

// Spectrum of the bare well. Eigenfunctions are real, continuum-normalized
// (dx * sum phi^2 = 1), and phase-fixed so that the symmetric ground state
// has positive mass on x > 0 and <phi_1|x|phi_0> = b/2 > 0; the localized
// right-well combination is then (phi_0 + phi_1)/sqrt(2).
struct SpectralResult {
  std::vector<double> eigenvalues; // lowest retained_states, ascending
  double tunnel_split = 0.0;       // E_1 - E_0
  double doublet_gap = 0.0;        // E_2 - E_1
  double well_separation = 0.0;    // b = 2 <phi_1|x|phi_0>
  std::vector<double> x;           // grid nodes
  double dx = 0.0;
  Eigen::MatrixXd states;          // column j: eigenfunction j on the grid
};

// Dense sinc-DVR diagonalization of -(1/2m) d^2/dx^2 + V(x).
// Throws std::domain_error when the spec is invalid, when the grid gives
// the highest retained state fewer than 8 points per de Broglie
// wavelength, or when the tunnel splitting shifts by more than 0.1% under
// point-count doubling (grid too coarse).
SpectralResult solve_double_well(const DoubleWellSpec& spec);

// Semiclassical tunnel-splitting estimate: omega_osc exp(-S) with S the
// barrier action integral of sqrt(2m(V - E_0)) between the inner turning
// points and omega_osc the harmonic frequency at the well bottom. An
// order-of-magnitude figure, not a precision one.
struct WkbEstimate {
  double oscillator_frequency = 0.0;
  double turning_point = 0.0; // inner turning point a, V(+-a) = E_0
  double action = 0.0;        // S
  double splitting = 0.0;     // omega_osc * exp(-S)
};

// Throws std::domain_error when E_0 lies above the barrier top (no
// tunneling regime). The first overload solves the well for E_0 itself.
WkbEstimate wkb_splitting(const DoubleWellSpec& spec);
WkbEstimate wkb_splitting(const DoubleWellSpec& spec, double ground_energy);

// Physical coupling of the standing cavity mode sin(k(x - x0)) to the
// grid problem, restricted to one excitation sector.
struct SectorCoupling {
  double g = 0.01;
  double delta = 0.0;     // cavity-atom detuning (rotating frame)
  double wavenumber = 0.0; // k
  double offset = 0.0;     // x0
  int excitation = 1;      // sector number N >= 1
};

// Geometry from the dimensionless angles: k = 2 kappa / b, x0 = chi / k,
// with b taken from the solved spectrum.
SectorCoupling coupling_from_angles(double g, double delta, double kappa,
                                    double chi, int excitation,
                                    const SpectralResult& spectral);

// Two spatial channels of one excitation sector: psi_e pairs with photon
// number N - 1, psi_g with photon number N.
struct SectorWavefunction {
  Eigen::VectorXcd e_channel;
  Eigen::VectorXcd g_channel;
  double time = 0.0;
};

// Doublet-superposition initial state: the chosen well combination of
// (phi_0, phi_1) placed in the channel matching the internal state.
SectorWavefunction initial_doublet_state(const SpectralResult& spectral,
                                         WellState well,
                                         InternalState internal);

// Minimum-uncertainty packet of the well-bottom harmonic approximation,
// centered at `center`, in the excited channel; used to report the
// sensitivity of the validation to the initial-state choice.
SectorWavefunction initial_gaussian_state(const DoubleWellSpec& spec,
                                          const SpectralResult& spectral,
                                          double center);

// Overlaps with the doublet per channel, in the sector slot order
// {|N-1,+,e>, |N,+,g>, |N-1,-,e>, |N,-,g>}; residual is the probability
// mass outside the doublet.
struct DoubletProjection {
  Eigen::Vector4cd amplitudes = Eigen::Vector4cd::Zero();
  double residual = 0.0;
};
DoubletProjection project_to_doublet(const SectorWavefunction& psi,
                                     const SpectralResult& spectral);

struct PropagationOptions {
  double time_step = 0.02; // physical time; shrunk to land on sample times
  int order = 4;           // 2 = Strang splitting, 4 = its Yoshida triple
};

// Sampled observables of a grid propagation. Times are physical (multiply
// by g for the dimensionless gt). rho_LL/rho_RR are doublet-projected and
// comparable to the two-level model; rho_RR_raw is the x > 0 mass, which
// also counts population outside the doublet.
struct GridSeries {
  std::vector<double> times;
  std::vector<double> rho_LL, rho_RR, rho_RR_raw, rho_ee, x_mean;
  double max_norm_error = 0.0;      // max | norm - 1 | over the samples
  double energy_drift = 0.0;        // (E_max - E_min)/|E(0)| over the samples
  double max_doublet_residual = 0.0;
  SectorWavefunction final_state;
};

// Split-operator propagation of the two-channel Schroedinger equation
//   i d/dt (psi_e, psi_g) = [T + V(x) -+ delta/2 + c(x) sigma_x] (psi_e, psi_g),
//   c(x) = g sqrt(N) sin(k(x - x0)),
// kinetic steps in momentum space, the local 2x2 exponential applied in
// closed form (norm-preserving by construction). The effective time step
// must satisfy 2 * dt * (2|V_min| + |delta| + 2 g sqrt(N)) <= 1, the
// stability criterion of the splitting; violations throw
// std::domain_error.
GridSeries propagate_sector(const DoubleWellSpec& spec,
                            const SpectralResult& spectral,
                            const SectorCoupling& coupling,
                            const SectorWavefunction& initial, double t_max,
                            int samples, const PropagationOptions& opts = {});

} // namespace cavtun

#endif
