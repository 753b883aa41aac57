#include "cavtun/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cavtun/fft.hpp"

namespace cavtun {

namespace {

// Omega_tun at photon number m, in units of g (the field couples the
// m-photon ground components to sector N = m + 1).
double omega_tun_over_g(const SystemParams& p, double m) {
  const double dg = p.tunnel_split / p.g;
  return std::sqrt(dg * dg + m + 1.0);
}

void require_n_mean(double n_mean) {
  if (!(n_mean >= 1.0))
    throw std::domain_error("collapse/revival times need mean photon number >= 1");
}

} // namespace

TimePair collapse_time(const SystemParams& p, double n_mean) {
  require_n_mean(n_mean);
  const double dg = p.tunnel_split / p.g;
  TimePair t;
  t.formula = 1.0 + (dg * dg + 0.75) / (2.0 * n_mean);
  const double root = std::sqrt(n_mean);
  t.exact = 1.0 / (omega_tun_over_g(p, n_mean + root) -
                   omega_tun_over_g(p, n_mean - root));
  return t;
}

TimePair revival_time(const SystemParams& p, double n_mean) {
  require_n_mean(n_mean);
  const double dg = p.tunnel_split / p.g;
  TimePair t;
  t.formula = 4.0 * std::numbers::pi * std::sqrt(n_mean) *
              (1.0 + (dg * dg + 0.5) / (2.0 * n_mean));
  t.exact = 2.0 * std::numbers::pi /
            (omega_tun_over_g(p, n_mean) - omega_tun_over_g(p, n_mean - 1.0));
  return t;
}

RevivalReport detect_revival(const TimeSeries& series) {
  const std::size_t n = series.times.size();
  if (n < 16 || series.values.size() != n)
    throw std::domain_error("revival detection needs a sampled series");
  const double n_mean = field_n_mean(series.field);
  require_n_mean(n_mean);

  const TimePair tc = collapse_time(series.params, n_mean);
  const TimePair tr = revival_time(series.params, n_mean);
  if (series.times.back() < 1.5 * tr.exact)
    throw std::domain_error(
        "series must cover at least 1.5x the predicted revival time");

  const double dt = series.times[1] - series.times[0];
  const double period =
      2.0 * std::numbers::pi / omega_tun_over_g(series.params, n_mean);
  const int window = std::max(1, static_cast<int>(period / dt));

  auto env = moving_average(analytic_envelope(series.values),
                            std::max(1, window / 2));

  // Peak search after the collapse has passed, clear of the smoothing
  // window at the right edge.
  const std::ptrdiff_t i0 =
      std::lower_bound(series.times.begin(), series.times.end(),
                       3.0 * tc.formula) -
      series.times.begin();
  const std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(n) - window - 1;
  if (i0 >= i1)
    throw std::domain_error("series too short for the revival search window");
  std::ptrdiff_t ipk = i0;
  for (std::ptrdiff_t i = i0; i < i1; ++i)
    if (env[i] > env[ipk]) ipk = i;

  RevivalReport rep;
  rep.t_c_formula = tc.formula;
  rep.t_c_exact = tc.exact;
  rep.t_r_formula = tr.formula;
  rep.t_r_exact = tr.exact;
  rep.t_r_measured = series.times[ipk];
  rep.initial_amplitude = *std::max_element(
      env.begin(), env.begin() + std::min<std::ptrdiff_t>(window + 1, n));
  rep.min_before_peak =
      ipk > 0 ? *std::min_element(env.begin(), env.begin() + ipk) : env[0];
  rep.collapsed = rep.min_before_peak < 0.2 * rep.initial_amplitude;

  if (!(env[ipk] > 1e-12) || !(rep.initial_amplitude > 1e-12))
    throw std::domain_error("no revival detected");

  rep.envelope.times = series.times;
  rep.envelope.values = std::move(env);
  rep.envelope.label = "envelope";
  rep.envelope.params = series.params;
  rep.envelope.field = series.field;
  return rep;
}

} // namespace cavtun
