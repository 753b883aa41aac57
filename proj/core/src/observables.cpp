#include "cavtun/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "cavtun/parallel.hpp"
#include "cavtun/sector.hpp"

namespace cavtun {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;
constexpr int max_fock = 4096;

std::array<complex, 2> well_amps(WellState well) {
  switch (well) {
    case WellState::left: return {complex{inv_sqrt2}, complex{-inv_sqrt2}};
    case WellState::right: return {complex{inv_sqrt2}, complex{inv_sqrt2}};
    case WellState::plus: return {complex{1.0}, complex{0.0}};
    case WellState::minus: return {complex{0.0}, complex{1.0}};
  }
  throw std::logic_error("unreachable well state");
}

// Coherent amplitudes c_n = e^{-|a|^2/2} a^n / sqrt(n!) up to the smallest
// n_max with tail <= requested; computed by the stable ratio recurrence.
std::vector<complex> coherent_amps(complex alpha, double tail) {
  if (!(tail > 0.0))
    throw std::domain_error("coherent truncation tail must be positive");
  std::vector<complex> c;
  complex cn = std::exp(complex{-0.5 * std::norm(alpha), 0.0});
  double kept = std::norm(cn);
  c.push_back(cn);
  while (1.0 - kept > tail) {
    const int n = static_cast<int>(c.size());
    if (n > max_fock)
      throw std::domain_error(
          "coherent truncation tail unreachable within 4096 photons");
    cn *= alpha / std::sqrt(static_cast<double>(n));
    kept += std::norm(cn);
    c.push_back(cn);
  }
  return c;
}

void add_block(Eigen::Matrix2cd& rho, const complex& a_plus,
               const complex& a_minus) {
  const complex aL = (a_plus - a_minus) * inv_sqrt2;
  const complex aR = (a_plus + a_minus) * inv_sqrt2;
  rho(0, 0) += std::conj(aL) * aL;
  rho(1, 1) += std::conj(aR) * aR;
  rho(0, 1) += aL * std::conj(aR);
  rho(1, 0) += aR * std::conj(aL);
}

struct Reductions {
  double rho_LL, rho_RR, rho_ee;
};

// Population part of both reductions in one pass; used by trace_series.
Reductions reduce_populations(const CompositeState& s) {
  Reductions r{0.0, 0.0, 0.0};
  auto add_pair = [&r](const complex& ap, const complex& am) {
    r.rho_LL += 0.5 * std::norm(ap - am);
    r.rho_RR += 0.5 * std::norm(ap + am);
  };
  add_pair(s.ground[0], s.ground[1]);
  for (const auto& a : s.sectors) {
    add_pair(a(0), a(2));
    add_pair(a(1), a(3));
    r.rho_ee += std::norm(a(0)) + std::norm(a(2));
  }
  return r;
}

} // namespace

double field_n_mean(const FieldSpec& field) {
  return field.kind == FieldSpec::Kind::fock
             ? static_cast<double>(field.n_photons)
             : std::norm(field.alpha);
}

CompositeState initial_state(const FieldSpec& field, WellState well,
                             InternalState internal) {
  if (field.kind == FieldSpec::Kind::fock &&
      (field.n_photons < 0 || field.n_photons > max_fock))
    throw std::domain_error("Fock photon number out of range");

  std::vector<complex> cn;
  double tail = 0.0;
  if (field.kind == FieldSpec::Kind::fock) {
    cn.assign(static_cast<std::size_t>(field.n_photons) + 1, complex{0.0});
    cn.back() = complex{1.0};
  } else {
    cn = coherent_amps(field.alpha, field.truncation_tail);
    double kept = 0.0;
    for (const auto& c : cn) kept += std::norm(c);
    tail = 1.0 - kept;
    const double rescale = 1.0 / std::sqrt(kept);
    for (auto& c : cn) c *= rescale;
  }

  const auto w = well_amps(well);
  CompositeState s;
  s.truncation_tail = tail;
  const int n_top = static_cast<int>(cn.size()) - 1;
  const int top_sector = internal == InternalState::excited ? n_top + 1 : n_top;
  s.sectors.assign(static_cast<std::size_t>(top_sector),
                   Eigen::Vector4cd::Zero());
  for (int n = 0; n <= n_top; ++n) {
    if (cn[n] == complex{0.0}) continue;
    if (internal == InternalState::excited) {
      auto& a = s.sector(n + 1); // photon n, excited atom
      a(0) += cn[n] * w[0];
      a(2) += cn[n] * w[1];
    } else if (n == 0) {
      s.ground[0] += cn[n] * w[0];
      s.ground[1] += cn[n] * w[1];
    } else {
      auto& a = s.sector(n); // photon n, ground atom
      a(1) += cn[n] * w[0];
      a(3) += cn[n] * w[1];
    }
  }
  return s;
}

CompositeState evolve(const CompositeState& s, const SystemParams& p, double t) {
  CompositeState out = s;
  evolve_ground(p, t, out.ground);
  for (int n = 1; n <= s.max_sector(); ++n)
    out.sector(n) = evolve_in_basis(sector_eigenbasis(p, n), t, s.sector(n));
  return out;
}

Eigen::Matrix2cd reduce_external(const CompositeState& s) {
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  add_block(rho, s.ground[0], s.ground[1]);
  for (const auto& a : s.sectors) {
    add_block(rho, a(0), a(2));
    add_block(rho, a(1), a(3));
  }
  return rho;
}

Eigen::Matrix2cd reduce_internal(const CompositeState& s) {
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  rho(0, 0) += std::norm(s.ground[0]) + std::norm(s.ground[1]);
  for (const auto& a : s.sectors) {
    rho(0, 0) += std::norm(a(1)) + std::norm(a(3));
    rho(1, 1) += std::norm(a(0)) + std::norm(a(2));
  }
  // g-e coherence: a ground-atom component with n photons lives in sector
  // n, the matching excited component in sector n + 1.
  for (int n = 0; n <= s.max_sector() - 1; ++n) {
    const auto& up = s.sector(n + 1);
    const complex g_plus = (n == 0) ? s.ground[0] : s.sector(n)(1);
    const complex g_minus = (n == 0) ? s.ground[1] : s.sector(n)(3);
    const complex ge = g_plus * std::conj(up(0)) + g_minus * std::conj(up(2));
    rho(0, 1) += ge;
    rho(1, 0) += std::conj(ge);
  }
  return rho;
}

double mean_position(const CompositeState& s, const SystemParams& p) {
  const auto rho = reduce_external(s);
  return p.half_sep * (1.0 - 2.0 * rho(0, 0).real());
}

SeriesBundle trace_series(const FieldSpec& field, WellState well,
                          InternalState internal, const SystemParams& p,
                          const TimeGrid& grid) {
  if (grid.samples < 2 || !(grid.gt_max > 0.0))
    throw std::domain_error("time grid needs gt_max > 0 and >= 2 samples");

  const CompositeState s0 = initial_state(field, well, internal);
  std::vector<SectorEigenBasis> bases;
  bases.reserve(s0.sectors.size());
  for (int n = 1; n <= s0.max_sector(); ++n)
    bases.push_back(sector_eigenbasis(p, n));

  const int m = grid.samples;
  SeriesBundle out;
  for (TimeSeries* ts : {&out.rho_LL, &out.rho_RR, &out.rho_ee, &out.x_mean}) {
    ts->times.resize(m);
    ts->values.resize(m);
    ts->params = p;
    ts->field = field;
  }
  out.rho_LL.label = "rho_LL";
  out.rho_RR.label = "rho_RR";
  out.rho_ee.label = "rho_ee";
  out.x_mean.label = "x_mean";

  const double dgt = grid.gt_max / (m - 1);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    const double gt = dgt * static_cast<double>(i);
    const double t = gt / p.g;
    CompositeState st = s0;
    evolve_ground(p, t, st.ground);
    for (int n = 1; n <= s0.max_sector(); ++n)
      st.sector(n) = evolve_in_basis(bases[n - 1], t, s0.sector(n));
    const Reductions r = reduce_populations(st);
    out.rho_LL.times[i] = gt;
    out.rho_RR.times[i] = gt;
    out.rho_ee.times[i] = gt;
    out.x_mean.times[i] = gt;
    out.rho_LL.values[i] = r.rho_LL;
    out.rho_RR.values[i] = r.rho_RR;
    out.rho_ee.values[i] = r.rho_ee;
    out.x_mean.values[i] = p.half_sep * (1.0 - 2.0 * r.rho_LL);
  });
  return out;
}

} // namespace cavtun
