#ifndef CAVTUN_STATE_HPP
#define CAVTUN_STATE_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

namespace cavtun {

using complex = std::complex<double>;

// External (well) basis. |-> is the symmetric ground doublet state, |+>
// the antisymmetric one; the localized combinations are
//   |L> = (|+> - |->)/sqrt(2),   |R> = (|+> + |->)/sqrt(2).
enum class WellState { left, right, plus, minus };

enum class InternalState { ground, excited };

// Amplitudes on {|+>, |->}  ->  amplitudes on {|L>, |R>}.
std::array<complex, 2> basis_change_well(const std::array<complex, 2>& pm);
// Inverse map, {|L>, |R>} -> {|+>, |->}.
std::array<complex, 2> basis_change_pm(const std::array<complex, 2>& lr);

// Pure state of field x well x internal degrees of freedom, organized by
// excitation number N = n_photons + n_atomic_excitations, which the coupled
// dynamics conserves.
//
// Sector N >= 1 holds four amplitudes ordered
//   {|N-1,+,e>, |N,+,g>, |N-1,-,e>, |N,-,g>}
// (photon number first, then well state, then internal state). The N = 0
// sector is the uncoupled pair {|0,+,g>, |0,-,g>}.
//
// Amplitudes are stored in the rotating gauge with the common
// (N - 1/2)*omega phase of each sector removed. Every observable exported
// here is diagonal in photon number, so that phase cancels; the flag below
// records the choice for anyone adding field-coherence observables.
struct CompositeState {
  std::array<complex, 2> ground{complex{0.0}, complex{0.0}};
  std::vector<Eigen::Vector4cd> sectors; // sectors[i] -> N = i + 1
  double truncation_tail = 0.0; // probability mass dropped at construction
  static constexpr bool sector_phase_gauge = true;

  double norm_sq() const;
  double norm() const;
  int max_sector() const { return static_cast<int>(sectors.size()); }
  Eigen::Vector4cd& sector(int n) { return sectors[n - 1]; }
  const Eigen::Vector4cd& sector(int n) const { return sectors[n - 1]; }
};

// Squared overlap |<a|b>|^2; insensitive to global phase by construction.
double overlap_sq(const CompositeState& a, const CompositeState& b);

} // namespace cavtun

#endif
