#ifndef CAVTUN_SECTOR_HPP
#define CAVTUN_SECTOR_HPP

#include <Eigen/Dense>
#include <array>

#include "cavtun/params.hpp"
#include "cavtun/state.hpp"

namespace cavtun {

// The coupled dynamics conserves the excitation number N, so the full
// Hamiltonian splits into 4x4 blocks on {|N-1,+,e>, |N,+,g>, |N-1,-,e>,
// |N,-,g>} plus the uncoupled N = 0 pair. This module owns those blocks:
// exact construction, the closed-form eigenfrequencies, the closed-form
// propagator on its chi lattice, a spectral-decomposition propagator valid
// everywhere, and the limiting-regime formulas for single-sector dynamics.

// Eigenfrequency set of one sector. omega_sq is the auxiliary frequency
// under the outer radical (a name, not a square); the block spectrum is
// {+omega_plus/2, +omega_minus/2, -omega_minus/2, -omega_plus/2}.
struct EigenFrequencies {
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double omega_sq = 0.0;
  std::array<double, 4> lambdas{};
};

// 4x4 Hermitian block for excitation number N >= 1 (real entries):
//   diag = ((D-d)/2, (D+d)/2, (-D-d)/2, (-D+d)/2)    D = tunnel_split, d = delta
//   <1|H|2> = <3|H|4> = -g sqrt(N) sin(chi) cos(kappa)
//   <1|H|4> = <3|H|2> = +g sqrt(N) cos(chi) sin(kappa)
// Throws std::domain_error for N < 1 (the N = 0 pair is evolve_ground's).
Eigen::Matrix4cd build_sector_hamiltonian(const SystemParams& p, int N);

EigenFrequencies eigenfrequencies(const SystemParams& p, int N);

// Closed-form propagator exp(-i H t), valid on chi = -pi/4 - 2*pi*n.
// Throws std::domain_error off that lattice. Near-degenerate frequency
// products are routed to the spectral propagator, whose value the closed
// form approaches there as a removable limit.
Eigen::Matrix4cd propagator_analytic(const SystemParams& p, int N, double t);

// exp(-i H t) from the spectral decomposition of the Hermitian block.
// Valid for any chi; unitary to machine precision at any t.
Eigen::Matrix4cd propagator_oracle(const SystemParams& p, int N, double t);

// Precomputed eigenbasis for repeated propagation of one sector.
struct SectorEigenBasis {
  Eigen::Matrix4cd vectors; // columns are eigenvectors
  Eigen::Vector4d values;
};
SectorEigenBasis sector_eigenbasis(const SystemParams& p, int N);
Eigen::Vector4cd evolve_in_basis(const SectorEigenBasis& basis, double t,
                                 const Eigen::Vector4cd& a0);
Eigen::Matrix4cd propagator_from_basis(const SectorEigenBasis& basis, double t);

// The N = 0 pair {|0,+,g>, |0,-,g>} is exactly decoupled from the field;
// its two members sit at +-tunnel_split/2 and just pick up the phases
// exp(-+ i tunnel_split t / 2). A particle prepared in |0,R,g> therefore
// shows the bare tunneling rho_LL = sin^2(tunnel_split * t / 2).
void evolve_ground(const SystemParams& p, double t, std::array<complex, 2>& amps);

// Resonant closed forms: delta = 0, kappa = pi/4, chi on the analytic
// lattice, initial state |N-1,R,e>. Both throw std::domain_error off that
// domain. Omega_tun = (omega_plus + omega_minus)/2 = sqrt(D^2 + N g^2).
double resonant_omega_tun(const SystemParams& p, int N);
double resonant_rho_LL(const SystemParams& p, int N, double t);
double resonant_rho_ee(const SystemParams& p, int N, double t);

// Effective two-photon (Raman-like) rate for tunnel_split << g << |delta|:
//   Omega_bar = sqrt(delta^2 D^2 + N^2 g^4 sin^2(2 kappa)) / delta   (signed).
// Throws std::domain_error at delta = 0.
double far_detuned_effective(const SystemParams& p, int N);

// Left-well population in the same regime for the initial state |N-1,-,e>:
//   rho_LL(t) = 1/2 - N delta D sin(2k) g^2 / (2 W^2) * (1 - cos(Omega_bar t)),
// with W = delta * Omega_bar. The excited-state population stays 1 up to
// O(D/g) corrections.
double far_detuned_rho_LL(const SystemParams& p, int N, double t);

} // namespace cavtun

#endif
