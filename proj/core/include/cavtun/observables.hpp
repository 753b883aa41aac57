#ifndef CAVTUN_OBSERVABLES_HPP
#define CAVTUN_OBSERVABLES_HPP

#include <string>
#include <vector>

#include "cavtun/params.hpp"
#include "cavtun/state.hpp"

namespace cavtun {

// Initial field preparation. A coherent state |alpha> populates photon
// numbers with Poisson weights; it is truncated at the smallest n_max whose
// remaining tail mass is <= truncation_tail, and the kept amplitudes are
// renormalized so the composite state has unit norm. The dropped mass is
// recorded on the state.
struct FieldSpec {
  enum class Kind { fock, coherent };
  Kind kind = Kind::fock;
  int n_photons = 0;       // Fock
  complex alpha{0.0, 0.0}; // coherent
  double truncation_tail = 1e-12;
};

// n >= 2 uniformly spaced samples of gt on [0, gt_max], endpoints included.
struct TimeGrid {
  double gt_max = 0.0;
  int samples = 4096;
};

// One uniformly sampled observable trace. Times are in units of 1/g (the
// dimensionless product g*t); values are probabilities except for the mean
// position, which carries length units.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string label;
  SystemParams params;
  FieldSpec field;
};

struct SeriesBundle {
  TimeSeries rho_LL, rho_RR, rho_ee, x_mean;
};

// Builds |field> x |well> x |internal>, distributing each photon-n
// component into the conserved-excitation sector it belongs to (n + 1 for
// an excited atom, n for a ground atom, the uncoupled pair for n = 0).
// Throws std::domain_error if the requested coherent tail cannot be
// reached within n_max <= 4096 photons.
CompositeState initial_state(const FieldSpec& field, WellState well,
                             InternalState internal);

// Advances every sector by its own block propagator and the N = 0 pair by
// its free phases. Exactly norm-preserving.
CompositeState evolve(const CompositeState& s, const SystemParams& p, double t);

// Reduced 2x2 density matrices; Hermitian, unit trace, positive
// semidefinite. reduce_external is over {|L>, |R>} (entry (0,0) is
// rho_LL), reduce_internal over {|g>, |e>} (entry (1,1) is rho_ee). The
// populations are invariant under the stored sector-phase gauge; the g-e
// coherence connects neighboring sectors and is reported in that gauge.
Eigen::Matrix2cd reduce_external(const CompositeState& s);
Eigen::Matrix2cd reduce_internal(const CompositeState& s);

// <x> = (b/2) (1 - 2 rho_LL), the well-basis position expectation.
double mean_position(const CompositeState& s, const SystemParams& p);

// Full trace: prepares the initial state, evolves it across the grid, and
// reduces each sample. Samples are independent (each one is propagated
// from t = 0 in the sector eigenbases), so they are evaluated in parallel
// and the result does not depend on the worker count.
SeriesBundle trace_series(const FieldSpec& field, WellState well,
                          InternalState internal, const SystemParams& p,
                          const TimeGrid& grid);

// Mean photon number of a field (n for Fock, |alpha|^2 for coherent).
double field_n_mean(const FieldSpec& field);

} // namespace cavtun

#endif
