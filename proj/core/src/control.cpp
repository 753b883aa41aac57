#include "cavtun/control.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cavtun/observables.hpp"

namespace cavtun {

CompositeState apply_pi_pulse(const CompositeState& s) {
  const complex minus_i{0.0, -1.0};
  CompositeState out;
  out.truncation_tail = s.truncation_tail;
  out.sectors.assign(static_cast<std::size_t>(s.max_sector()) + 1,
                     Eigen::Vector4cd::Zero());

  out.sector(1)(0) = minus_i * s.ground[0];
  out.sector(1)(2) = minus_i * s.ground[1];
  for (int n = 1; n <= s.max_sector(); ++n) {
    const auto& a = s.sector(n);
    // Slots 0/2 hold |n-1,+-,e>; they land on |n-1,+-,g>.
    if (n == 1) {
      out.ground[0] = minus_i * a(0);
      out.ground[1] = minus_i * a(2);
    } else {
      out.sector(n - 1)(1) = minus_i * a(0);
      out.sector(n - 1)(3) = minus_i * a(2);
    }
    // Slots 1/3 hold |n,+-,g>; they land on |n,+-,e> in sector n + 1.
    out.sector(n + 1)(0) = minus_i * a(1);
    out.sector(n + 1)(2) = minus_i * a(3);
  }
  while (!out.sectors.empty() && out.sectors.back().isZero(0.0))
    out.sectors.pop_back();
  return out;
}

ProtocolResult run_protocol(const std::vector<ProtocolStep>& steps,
                            const CompositeState& initial,
                            const CompositeState& target) {
  if (steps.empty()) throw std::domain_error("empty protocol");

  ProtocolResult res;
  CompositeState state = initial;
  res.intermediates.reserve(steps.size());
  for (const auto& step : steps) {
    if (step.kind == ProtocolStep::Kind::pi_pulse) {
      state = apply_pi_pulse(state);
    } else {
      if (!(step.gt >= 0.0))
        throw std::domain_error("free evolution duration must be >= 0");
      state = evolve(state, step.params, step.gt / step.params.g);
    }
    res.intermediates.push_back(state);
  }

  res.fidelity = overlap_sq(target, state);

  // Leakage: mass in sectors where the target has none.
  const double support_floor = 1e-20;
  const bool ground_supported =
      std::norm(target.ground[0]) + std::norm(target.ground[1]) >
      support_floor;
  if (!ground_supported)
    res.leakage += std::norm(state.ground[0]) + std::norm(state.ground[1]);
  for (int n = 1; n <= state.max_sector(); ++n) {
    const bool supported = n <= target.max_sector() &&
                           target.sector(n).squaredNorm() > support_floor;
    if (!supported) res.leakage += state.sector(n).squaredNorm();
  }
  res.final_state = std::move(state);
  return res;
}

std::vector<ProtocolStep> superposition_schedule(double theta,
                                                 const SystemParams& p) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi))
    throw std::domain_error("superposition angle must lie in [0, pi]");
  if (!(p.tunnel_split > 0.0))
    throw std::domain_error(
        "superposition schedule needs a nonzero tunnel splitting");

  const double kappa = std::numbers::pi / 4.0;
  const double chi = -std::numbers::pi / 4.0;
  // Two-photon resonance: the effective |+-> rotation then runs at
  // sqrt(2) * tunnel_split.
  const double delta =
      -p.g * p.g * std::sin(2.0 * kappa) / p.tunnel_split;
  const SystemParams evolve_params =
      make_params(p.g, delta, p.tunnel_split, kappa, chi, p.half_sep);

  ProtocolStep pulse;
  pulse.kind = ProtocolStep::Kind::pi_pulse;
  ProtocolStep free_step;
  free_step.kind = ProtocolStep::Kind::free_evolve;
  free_step.gt = theta / (std::sqrt(2.0) * p.tunnel_split / p.g);
  free_step.params = evolve_params;
  return {pulse, free_step, pulse};
}

} // namespace cavtun
