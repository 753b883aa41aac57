#ifndef CAVTUN_CONTROL_HPP
#define CAVTUN_CONTROL_HPP

#include <vector>

#include "cavtun/params.hpp"
#include "cavtun/state.hpp"

namespace cavtun {

// One step of a pulse/evolution schedule. Pulses are idealized as
// instantaneous internal rotations (valid when the Rabi frequency of the
// driving laser dominates every other rate and the laser does not address
// the motion); free evolution runs the full coupled dynamics for a
// dimensionless duration g*t under its own parameter set.
struct ProtocolStep {
  enum class Kind { pi_pulse, free_evolve };
  Kind kind = Kind::pi_pulse;
  double gt = 0.0;     // free_evolve duration, units 1/g
  SystemParams params; // free_evolve parameters
};

struct ProtocolResult {
  CompositeState final_state;
  double fidelity = 0.0; // |<target|final>|^2, global-phase insensitive
  double leakage = 0.0;  // mass outside the sectors the target occupies
  // State after each step, for inspection; intermediates[i] follows step i.
  std::vector<CompositeState> intermediates;
};

// Instantaneous pi-pulse on the internal degree of freedom:
// |g> -> -i|e>, |e> -> -i|g>, photon and well labels untouched. Because the
// excitation bookkeeping counts the atom, every ground component with n
// photons moves between sector n and sector n + 1 (the n = 0 ground pair
// exchanges with sector-1 slots). Exactly norm-preserving.
CompositeState apply_pi_pulse(const CompositeState& s);

// Runs the schedule and scores the final state against the target.
// Throws std::domain_error on an empty schedule or negative duration.
ProtocolResult run_protocol(const std::vector<ProtocolStep>& steps,
                            const CompositeState& initial,
                            const CompositeState& target);

// Pulse / free-evolution / pulse schedule that rotates a ground-state atom
// from |-> by the angle theta on the |+-> Bloch sphere: free evolution at
// delta = -g^2 sin(2 kappa) / D (the two-photon resonance condition),
// kappa = pi/4, for g*t = theta / (sqrt(2) D/g). theta = pi prepares the
// left well, theta = pi/2 an equal-weight superposition. Requires
// theta in [0, pi] and tunnel_split > 0; throws std::domain_error else.
std::vector<ProtocolStep> superposition_schedule(double theta,
                                                 const SystemParams& p);

} // namespace cavtun

#endif
