#ifndef CAVTUN_ENVELOPE_HPP
#define CAVTUN_ENVELOPE_HPP

#include "cavtun/observables.hpp"
#include "cavtun/params.hpp"

namespace cavtun {

// A prediction in two flavors: the leading-order asymptotic printed form
// and the exact solution of its defining condition. Both in units of 1/g.
struct TimePair {
  double formula = 0.0;
  double exact = 0.0;
};

// Collapse time of the coherent-field oscillation of <x>:
//   formula: t_c = (1/g) (1 + ((D/g)^2 + 3/4) / (2 n_mean))
//   exact:   (Omega_tun(n+sqrt(n)) - Omega_tun(n-sqrt(n))) t_c = 1
// with Omega_tun(m) = sqrt(D^2 + (m+1) g^2), D the tunnel splitting.
// Throws std::domain_error for n_mean < 1.
TimePair collapse_time(const SystemParams& p, double n_mean);

// Revival time:
//   formula: t_r = (4 pi sqrt(n)/g) (1 + ((D/g)^2 + 1/2) / (2 n))
//   exact:   (Omega_tun(n) - Omega_tun(n-1)) t_r = 2 pi
TimePair revival_time(const SystemParams& p, double n_mean);

// Envelope analysis of one collapse-revival trace.
struct RevivalReport {
  double t_c_formula = 0.0;
  double t_c_exact = 0.0;
  double t_r_formula = 0.0;
  double t_r_exact = 0.0;
  double t_r_measured = 0.0;      // arg-max of the detected envelope
  double initial_amplitude = 0.0; // envelope max over the first tunnel period
  double min_before_peak = 0.0;   // envelope floor before the revival
  bool collapsed = false;         // floor dropped below 20% of the initial amplitude
  TimeSeries envelope;
};

// Measures the revival empirically: analytic-signal envelope of the trace,
// smoothed over one tunnel period 2 pi / Omega_tun(n_mean), peak searched
// after 3 t_c. The series must cover at least 1.5x the predicted (exact)
// revival time; a series with no oscillation at all gives "no revival
// detected". Both failures throw std::domain_error.
RevivalReport detect_revival(const TimeSeries& series);

} // namespace cavtun

#endif
