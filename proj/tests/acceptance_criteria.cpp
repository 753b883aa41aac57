// Acceptance gate: each criterion prints exactly one PASS/FAIL line with
// its measured numbers and exits nonzero on failure. Run as
//   acceptance_criteria <1..8>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>

#include "cavtun/control.hpp"
#include "cavtun/envelope.hpp"
#include "cavtun/fft.hpp"
#include "cavtun/grid.hpp"
#include "cavtun/observables.hpp"
#include "cavtun/sector.hpp"

using namespace cavtun;

namespace {

constexpr double pi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// rho_LL of one sector amplitude vector: L components of both channels.
double sector_rho_LL(const Eigen::Vector4cd& a) {
  return 0.5 * (std::norm(a(0) - a(2)) + std::norm(a(1) - a(3)));
}

// --------------------------------------------------------------- 1 and 2 --

SystemParams random_lattice_params(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double chi = -pi / 4 - 2.0 * pi * (static_cast<int>(u(rng) * 3.0) - 1);
  return make_params(0.1 + 2.9 * u(rng), -5.0 + 10.0 * u(rng), 5.0 * u(rng),
                     2.0 * pi * u(rng), chi);
}

Outcome criterion_1() {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_dev = 0.0, worst_unit = 0.0;
  const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();
  for (int trial = 0; trial < 1000; ++trial) {
    SystemParams p = random_lattice_params(rng);
    int N = 1 + static_cast<int>(u(rng) * 40.0);
    double t = 20.0 * u(rng);
    Eigen::Matrix4cd ua = propagator_analytic(p, N, t);
    Eigen::Matrix4cd uo = propagator_oracle(p, N, t);
    worst_dev = std::max(worst_dev, (ua - uo).cwiseAbs().maxCoeff());
    worst_unit = std::max(worst_unit,
                          (ua.adjoint() * ua - id).cwiseAbs().maxCoeff());
    worst_unit = std::max(worst_unit,
                          (uo.adjoint() * uo - id).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.pass = worst_dev < 1e-8 && worst_unit < 1e-10;
  o.detail = "worst |U_closed - U_spectral| = " + fmt(worst_dev) +
             ", worst unitarity defect = " + fmt(worst_unit) +
             " over 1000 draws";
  return o;
}

Outcome criterion_2() {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    SystemParams p = random_lattice_params(rng);
    int N = 1 + static_cast<int>(u(rng) * 40.0);
    auto f = eigenfrequencies(p, N);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(
        build_sector_hamiltonian(p, N));
    for (int i = 0; i < 4; ++i)
      worst = std::max(worst, std::abs(f.lambdas[i] - es.eigenvalues()(3 - i)));
  }
  // Decoupled case cos(kappa) = 1: each channel is a two-level problem and
  // the frequencies reduce to |sqrt(4 N g^2 sin^2 chi + delta^2) +- D|.
  double worst_dec = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    SystemParams p = make_params(0.1 + 2.9 * u(rng), -5.0 + 10.0 * u(rng),
                                 5.0 * u(rng), 0.0, 2.0 * pi * u(rng));
    int N = 1 + static_cast<int>(u(rng) * 40.0);
    auto f = eigenfrequencies(p, N);
    double s = std::sin(p.chi);
    double rabi = std::sqrt(4.0 * N * p.g * p.g * s * s + p.delta * p.delta);
    worst_dec = std::max(worst_dec,
                         std::abs(f.omega_plus - std::abs(rabi + p.tunnel_split)));
    worst_dec = std::max(worst_dec,
                         std::abs(f.omega_minus - std::abs(rabi - p.tunnel_split)));
  }
  Outcome o;
  o.pass = worst < 1e-10 && worst_dec < 1e-10;
  o.detail = "worst spectrum deviation = " + fmt(worst) +
             ", decoupled-case deviation = " + fmt(worst_dec);
  return o;
}

// -------------------------------------------------------------------- 3 --

RevivalReport coherent_revival(double tunnel, double gt_max) {
  FieldSpec f;
  f.kind = FieldSpec::Kind::coherent;
  f.alpha = 5.0;
  auto p = make_params(1.0, 0.0, tunnel, pi / 4, -pi / 4);
  auto b = trace_series(f, WellState::right, InternalState::excited, p,
                        TimeGrid{gt_max, 4096});
  return detect_revival(b.x_mean);
}

Outcome criterion_3() {
  RevivalReport r2 = coherent_revival(2.0, 120.0);
  RevivalReport r5 = coherent_revival(5.0, 140.0);

  // Envelope must be collapsed before gt = 20.
  double floor20 = r2.initial_amplitude;
  for (size_t i = 0; i < r2.envelope.times.size(); ++i)
    if (r2.envelope.times[i] <= 20.0)
      floor20 = std::min(floor20, r2.envelope.values[i]);
  bool collapsed = floor20 < 0.2 * r2.initial_amplitude;

  bool peak_vs_exact =
      std::abs(r2.t_r_measured - r2.t_r_exact) < 0.10 * r2.t_r_exact;
  // Recorded reference peaks for n_mean = 25 at the two splittings.
  bool ref2 = std::abs(r2.t_r_measured - 68.23) < 0.10 * 68.23;
  bool ref5 = std::abs(r5.t_r_measured - 86.70) < 0.10 * 86.70;
  bool ordering = r5.initial_amplitude > r2.initial_amplitude;

  Outcome o;
  o.pass = collapsed && peak_vs_exact && ref2 && ref5 && ordering;
  o.detail = "measured peaks gt = " + fmt(r2.t_r_measured) + " / " +
             fmt(r5.t_r_measured) + " vs exact " + fmt(r2.t_r_exact) + " / " +
             fmt(r5.t_r_exact) + " and references 68.23 / 86.70; envelope floor " +
             fmt(floor20 / r2.initial_amplitude) +
             " of initial before gt = 20; amplitudes " +
             fmt(r5.initial_amplitude) + " > " + fmt(r2.initial_amplitude) +
             "; asymptotic form gives " + fmt(r5.t_r_formula) +
             " (reported, not asserted)";
  return o;
}

// -------------------------------------------------------------------- 4 --

Outcome criterion_4() {
  auto p = make_params(1.0, 1.0, 1.0, pi / 4, -pi / 4);
  FieldSpec f; // one quantum: N = 1 with an excited atom
  auto b = trace_series(f, WellState::right, InternalState::excited, p,
                        TimeGrid{100.0, 4096});

  double mean_RR = 0.0;
  for (double v : b.rho_RR.values) mean_RR += v;
  mean_RR /= b.rho_RR.values.size();

  double dt = b.x_mean.times[1] - b.x_mean.times[0];
  auto peaks = dominant_peaks(power_spectrum(b.x_mean.values, dt), 0.01);

  // <x> beats at the transition-pair frequencies (Omega+ +- Omega-)/2 of
  // the sector spectrum {+-Omega+/2, +-Omega-/2}, not at Omega+- themselves.
  auto freqs = eigenfrequencies(p, 1);
  const double f_sum = 0.5 * (freqs.omega_plus + freqs.omega_minus);
  const double f_diff = 0.5 * (freqs.omega_plus - freqs.omega_minus);
  bool seen_sum = false, seen_diff = false, stray = false;
  for (const auto& pk : peaks) {
    if (std::abs(pk.frequency - f_sum) < 0.03)
      seen_sum = true;
    else if (std::abs(pk.frequency - f_diff) < 0.03)
      seen_diff = true;
    else
      stray = true;
  }

  Outcome o;
  o.pass = seen_sum && seen_diff && !stray && mean_RR > 0.5;
  o.detail = std::to_string(peaks.size()) +
             " peaks above 1% power at the transition pair {" + fmt(f_sum) +
             ", " + fmt(f_diff) + "}" + (stray ? " plus strays" : "") +
             "; mean initial-well population = " + fmt(mean_RR);
  return o;
}

// -------------------------------------------------------------------- 5 --

Outcome criterion_5() {
  const double g = 0.01, delta = 0.03;
  DoubleWellSpec spec;
  SpectralResult r = solve_double_well(spec);

  double split_ref = 0.003336;
  bool split_ok = std::abs(r.tunnel_split - split_ref) < 0.01 * split_ref;
  double ratio = r.doublet_gap / std::sqrt(4.0 * g * g + delta * delta);
  bool ratio_ok = std::abs(ratio - 44.4) < 0.02 * 44.4;

  auto c = coupling_from_angles(g, delta, pi / 4, -pi / 4, 1, r);
  auto init = initial_doublet_state(r, WellState::right, InternalState::excited);
  PropagationOptions opts;
  opts.time_step = 0.02;
  opts.order = 4;
  auto series = propagate_sector(spec, r, c, init, 40.0 / g, 401, opts);

  // All quantities in physical units: the model advances by the physical
  // sample times.
  auto p = make_params(g, delta, r.tunnel_split, pi / 4, -pi / 4);
  FieldSpec f;
  auto s0 = initial_state(f, WellState::right, InternalState::excited);
  double dev_RR = 0.0, dev_ee = 0.0;
  for (size_t i = 0; i < series.times.size(); ++i) {
    auto st = evolve(s0, p, series.times[i]);
    dev_RR = std::max(dev_RR, std::abs(series.rho_RR[i] -
                                       reduce_external(st)(1, 1).real()));
    dev_ee = std::max(dev_ee, std::abs(series.rho_ee[i] -
                                       reduce_internal(st)(1, 1).real()));
  }
  bool dev_ok = dev_RR < 0.05 && dev_ee < 0.05;

  Outcome o;
  o.pass = split_ok && ratio_ok && dev_ok;
  o.detail = "tunnel split = " + fmt(r.tunnel_split) + " (ref 0.003336, " +
             std::string(split_ok ? "ok" : "off") + "), gap ratio = " +
             fmt(ratio) + " (ref 44.4, " + (ratio_ok ? "ok" : "off") +
             "), grid-vs-model max dev rho_RR = " + fmt(dev_RR) +
             ", rho_ee = " + fmt(dev_ee) + " against bound 0.05";
  return o;
}

// -------------------------------------------------------------------- 6 --

Outcome criterion_6() {
  double worst_closed = 0.0;
  for (double tunnel : {0.5, 2.0, 7.0}) {
    auto p = make_params(1.0, 0.0, tunnel, pi / 4, -pi / 4);
    for (int N : {1, 4, 26}) {
      auto basis = sector_eigenbasis(p, N);
      Eigen::Vector4cd v0;
      v0 << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0), 0.0;
      double period = 2.0 * pi / resonant_omega_tun(p, N);
      for (int i = 0; i < 400; ++i) {
        double t = 3.0 * period * i / 399.0;
        double direct = sector_rho_LL(evolve_in_basis(basis, t, v0));
        worst_closed =
            std::max(worst_closed, std::abs(direct - resonant_rho_LL(p, N, t)));
      }
    }
  }

  // Degenerate doublet: tunneling is frozen no matter the field.
  auto p0 = make_params(1.0, 0.0, 0.0, pi / 4, -pi / 4);
  auto basis0 = sector_eigenbasis(p0, 3);
  Eigen::Vector4cd v0;
  v0 << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0), 0.0;
  double worst_frozen = 0.0;
  for (int i = 0; i < 200; ++i) {
    double t = 40.0 * i / 199.0;
    worst_frozen =
        std::max(worst_frozen, sector_rho_LL(evolve_in_basis(basis0, t, v0)));
  }

  // Strong splitting: the bare tunneling oscillation survives the field.
  auto ps = make_params(1.0, 0.0, 50.0, pi / 4, -pi / 4);
  auto basis_s = sector_eigenbasis(ps, 1);
  double worst_bare = 0.0;
  for (int i = 0; i < 400; ++i) {
    double t = 3.0 * (2.0 * pi / 50.0) * i / 399.0;
    double direct = sector_rho_LL(evolve_in_basis(basis_s, t, v0));
    double bare = std::sin(25.0 * t);
    worst_bare = std::max(worst_bare, std::abs(direct - bare * bare));
  }

  Outcome o;
  o.pass = worst_closed < 1e-10 && worst_frozen < 1e-12 && worst_bare < 0.02;
  o.detail = "closed-form deviation = " + fmt(worst_closed) +
             ", frozen-case leak = " + fmt(worst_frozen) +
             ", strong-splitting deviation = " + fmt(worst_bare);
  return o;
}

// -------------------------------------------------------------------- 7 --

Outcome criterion_7() {
  FieldSpec f;
  auto init = initial_state(f, WellState::minus, InternalState::ground);
  auto target = initial_state(f, WellState::left, InternalState::ground);
  std::string list;
  double prev = 0.0;
  bool monotone = true;
  double f_at_005 = 0.0;
  for (double d : {0.2, 0.1, 0.05, 0.02}) {
    auto p = make_params(1.0, 0.0, d, pi / 4, -pi / 4);
    auto r = run_protocol(superposition_schedule(pi, p), init, target);
    if (r.fidelity <= prev) monotone = false;
    prev = r.fidelity;
    if (d == 0.05) f_at_005 = r.fidelity;
    list += (list.empty() ? "" : ", ") + fmt(r.fidelity);
  }
  Outcome o;
  o.pass = monotone && f_at_005 > 0.99;
  o.detail = "fidelity " + list + " over splittings 0.2, 0.1, 0.05, 0.02; " +
             (monotone ? "monotone" : "not monotone") + ", " +
             fmt(f_at_005) + " at 0.05";
  return o;
}

// -------------------------------------------------------------------- 8 --

Outcome criterion_8() {
  auto p = make_params(1.0, -20.0, 0.05, pi / 4, -pi / 4);
  auto basis = sector_eigenbasis(p, 1);
  Eigen::Vector4cd v0;
  v0 << 0.0, 0.0, 1.0, 0.0; // |0,-,e>
  double period = 2.0 * pi / std::abs(far_detuned_effective(p, 1));
  double worst = 0.0;
  for (int i = 0; i < 400; ++i) {
    double t = 3.0 * period * i / 399.0;
    double direct = sector_rho_LL(evolve_in_basis(basis, t, v0));
    worst = std::max(worst, std::abs(direct - far_detuned_rho_LL(p, 1, t)));
  }
  Outcome o;
  o.pass = worst < 5.0 * 0.05;
  o.detail = "two-photon closed form deviation = " + fmt(worst) +
             " against bound 0.25 over three beat periods";
  return o;
}

} // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1..8>\n", argv[0]);
    return 2;
  }
  int n = std::atoi(argv[1]);
  Outcome o;
  switch (n) {
    case 1: o = criterion_1(); break;
    case 2: o = criterion_2(); break;
    case 3: o = criterion_3(); break;
    case 4: o = criterion_4(); break;
    case 5: o = criterion_5(); break;
    case 6: o = criterion_6(); break;
    case 7: o = criterion_7(); break;
    case 8: o = criterion_8(); break;
    default:
      std::fprintf(stderr, "usage: %s <criterion 1..8>\n", argv[0]);
      return 2;
  }
  std::printf("criterion %d: %s (%s)\n", n, o.pass ? "PASS" : "FAIL",
              o.detail.c_str());
  return o.pass ? 0 : 1;
}
