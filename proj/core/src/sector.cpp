#include "cavtun/sector.hpp"

#include <cmath>
#include <stdexcept>

namespace cavtun {

namespace {

constexpr complex I{0.0, 1.0};

void require_sector(int N) {
  if (N < 1)
    throw std::domain_error(
        "excitation number N must be >= 1; the N = 0 pair is handled by "
        "evolve_ground");
}

struct Freqs {
  double plus, minus, aux; // omega_plus, omega_minus, omega_sq
};

Freqs frequencies(double g, double delta, double Delta, double kappa,
                  double chi, int N) {
  const double Ng2 = N * g * g;
  const double ck = std::cos(kappa), sk = std::sin(kappa);
  const double cx = std::cos(chi), sx = std::sin(chi);
  const double aux2 = 4.0 * Ng2 * ck * ck * sx * sx *
                          (Delta * Delta + 4.0 * Ng2 * sk * sk * cx * cx) +
                      delta * delta * Delta * Delta;
  const double aux = std::sqrt(std::max(aux2, 0.0));
  const double base = 2.0 * Ng2 * (1.0 - std::cos(2.0 * kappa) * std::cos(2.0 * chi)) +
                      delta * delta + Delta * Delta;
  // base >= 2*aux holds for every Hermitian block; clamp rounding noise.
  const double plus = std::sqrt(std::max(base + 2.0 * aux, 0.0));
  const double minus = std::sqrt(std::max(base - 2.0 * aux, 0.0));
  return {plus, minus, aux};
}

// Entry family of the closed-form propagator. Every entry of U is one of
// four template functions of (delta, Delta) evaluated at sign-flipped
// arguments, a symmetry of the block under swapping the two wells and/or
// the two internal states.
struct EntryContext {
  double g, kappa, chi, t;
  int N;
};

complex entry_11(const EntryContext& c, double dl, double De) {
  const auto f = frequencies(c.g, dl, De, c.kappa, c.chi, c.N);
  const double lam = f.plus * f.minus * f.aux;
  const double Ng2 = c.N * c.g * c.g;
  const double ck = std::cos(c.kappa);
  const double xi = De * (dl * dl + 2.0 * Ng2 * ck * ck - dl * De);
  complex s{0.0, 0.0};
  for (int mu : {1, -1}) {
    const double om_mu = (mu == 1) ? f.plus : f.minus;
    const double om_other = (mu == 1) ? f.minus : f.plus;
    const double S = std::sin(om_mu * c.t / 2.0);
    const double C = std::cos(om_mu * c.t / 2.0);
    s += static_cast<double>(mu) * S * om_other * (xi + mu * (De - dl) * f.aux) -
         I * static_cast<double>(mu) * f.plus * f.minus * C * (dl * De - mu * f.aux);
  }
  return -I / (2.0 * lam) * s;
}

complex entry_12(const EntryContext& c, double dl, double De) {
  const auto f = frequencies(c.g, dl, De, c.kappa, c.chi, c.N);
  const double lam = f.plus * f.minus * f.aux;
  const double Ng2 = c.N * c.g * c.g;
  const double sk = std::sin(c.kappa);
  complex s{0.0, 0.0};
  for (int mu : {1, -1}) {
    const double om_mu = (mu == 1) ? f.plus : f.minus;
    const double om_other = (mu == 1) ? f.minus : f.plus;
    const double S = std::sin(om_mu * c.t / 2.0);
    const double C = std::cos(om_mu * c.t / 2.0);
    s += static_cast<double>(mu) * S * om_other *
             (De * De + 2.0 * Ng2 * sk * sk + mu * f.aux) +
         I * static_cast<double>(mu) * f.plus * f.minus * De * C;
  }
  return -I * std::sqrt(static_cast<double>(c.N)) * c.g * std::cos(c.kappa) /
         (std::sqrt(2.0) * lam) * s;
}

complex entry_13(const EntryContext& c, double dl, double De) {
  const auto f = frequencies(c.g, dl, De, c.kappa, c.chi, c.N);
  const double lam = f.plus * f.minus * f.aux;
  complex s{0.0, 0.0};
  for (int mu : {1, -1}) {
    const double om_mu = (mu == 1) ? f.plus : f.minus;
    const double S_other = std::sin(((mu == 1) ? f.minus : f.plus) * c.t / 2.0);
    const double C = std::cos(om_mu * c.t / 2.0);
    s += static_cast<double>(mu) * dl * om_mu * S_other +
         I * static_cast<double>(mu) * f.plus * f.minus * C;
  }
  return -I * static_cast<double>(c.N) * c.g * c.g * std::sin(2.0 * c.kappa) /
         (2.0 * lam) * s;
}

complex entry_23(const EntryContext& c, double dl, double De) {
  const auto f = frequencies(c.g, dl, De, c.kappa, c.chi, c.N);
  const double lam = f.plus * f.minus * f.aux;
  const double Ng2 = c.N * c.g * c.g;
  const double ck = std::cos(c.kappa);
  complex s{0.0, 0.0};
  for (int mu : {1, -1}) {
    const double om_mu = (mu == 1) ? f.plus : f.minus;
    const double S_other = std::sin(((mu == 1) ? f.minus : f.plus) * c.t / 2.0);
    s += static_cast<double>(mu) * om_mu * S_other *
         (dl * De + 2.0 * Ng2 * ck * ck - mu * f.aux);
  }
  return I * std::sqrt(static_cast<double>(c.N)) * c.g * std::sin(c.kappa) /
         (std::sqrt(2.0) * lam) * s;
}

} // namespace

Eigen::Matrix4cd build_sector_hamiltonian(const SystemParams& p, int N) {
  require_sector(N);
  const double a = p.g * std::sqrt(static_cast<double>(N)) * std::sin(p.chi) *
                   std::cos(p.kappa);
  const double b = p.g * std::sqrt(static_cast<double>(N)) * std::cos(p.chi) *
                   std::sin(p.kappa);
  const double D = p.tunnel_split, d = p.delta;
  Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
  H(0, 0) = (D - d) / 2.0;
  H(1, 1) = (D + d) / 2.0;
  H(2, 2) = (-D - d) / 2.0;
  H(3, 3) = (-D + d) / 2.0;
  H(0, 1) = H(1, 0) = -a;
  H(2, 3) = H(3, 2) = -a;
  H(0, 3) = H(3, 0) = b;
  H(1, 2) = H(2, 1) = b;
  return H;
}

EigenFrequencies eigenfrequencies(const SystemParams& p, int N) {
  require_sector(N);
  const auto f = frequencies(p.g, p.delta, p.tunnel_split, p.kappa, p.chi, N);
  EigenFrequencies out;
  out.omega_plus = f.plus;
  out.omega_minus = f.minus;
  out.omega_sq = f.aux;
  out.lambdas = {f.plus / 2.0, f.minus / 2.0, -f.minus / 2.0, -f.plus / 2.0};
  return out;
}

Eigen::Matrix4cd propagator_oracle(const SystemParams& p, int N, double t) {
  return propagator_from_basis(sector_eigenbasis(p, N), t);
}

SectorEigenBasis sector_eigenbasis(const SystemParams& p, int N) {
  const Eigen::Matrix4cd H = build_sector_hamiltonian(p, N);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(H);
  return {es.eigenvectors(), es.eigenvalues()};
}

Eigen::Vector4cd evolve_in_basis(const SectorEigenBasis& basis, double t,
                                 const Eigen::Vector4cd& a0) {
  Eigen::Vector4cd c = basis.vectors.adjoint() * a0;
  for (int i = 0; i < 4; ++i) c(i) *= std::exp(-I * basis.values(i) * t);
  return basis.vectors * c;
}

Eigen::Matrix4cd propagator_from_basis(const SectorEigenBasis& basis, double t) {
  Eigen::Vector4cd phases;
  for (int i = 0; i < 4; ++i) phases(i) = std::exp(-I * basis.values(i) * t);
  return basis.vectors * phases.asDiagonal() * basis.vectors.adjoint();
}

Eigen::Matrix4cd propagator_analytic(const SystemParams& p, int N, double t) {
  require_sector(N);
  if (!p.analytic_capable)
    throw std::domain_error(
        "closed-form propagator requires chi = -pi/4 - 2*pi*n; use "
        "propagator_oracle for general chi");
  const auto f = frequencies(p.g, p.delta, p.tunnel_split, p.kappa, p.chi, N);
  const double scale =
      std::max({f.plus, std::abs(p.delta), p.tunnel_split,
                p.g * std::sqrt(static_cast<double>(N))});
  // The closed-form denominators vanish when frequencies degenerate; the
  // limit is removable and equals the spectral propagator, so route there.
  if (f.plus * f.minus * f.aux < 1e-12 * scale * scale * scale)
    return propagator_oracle(p, N, t);

  const EntryContext c{p.g, p.kappa, p.chi, t, N};
  const double dl = p.delta, De = p.tunnel_split;
  Eigen::Matrix4cd U;
  U(0, 0) = entry_11(c, dl, De);
  U(1, 1) = entry_11(c, -dl, De);
  U(2, 2) = entry_11(c, dl, -De);
  U(3, 3) = entry_11(c, -dl, -De);
  U(0, 1) = entry_12(c, dl, De);
  U(2, 3) = entry_12(c, dl, -De);
  U(0, 2) = entry_13(c, dl, De);
  U(1, 3) = entry_13(c, -dl, De);
  U(1, 2) = entry_23(c, dl, De);
  U(0, 3) = entry_23(c, dl, -De);
  // The block is complex symmetric in this basis: U_ij = U_ji.
  U(1, 0) = U(0, 1);
  U(3, 2) = U(2, 3);
  U(2, 0) = U(0, 2);
  U(3, 1) = U(1, 3);
  U(2, 1) = U(1, 2);
  U(3, 0) = U(0, 3);
  return U;
}

void evolve_ground(const SystemParams& p, double t, std::array<complex, 2>& amps) {
  const double half = p.tunnel_split * t / 2.0;
  amps[0] *= std::exp(-I * half);
  amps[1] *= std::exp(I * half);
}

namespace {

void require_resonant(const SystemParams& p) {
  if (p.delta != 0.0)
    throw std::domain_error("resonant closed form requires delta = 0");
  if (std::abs(p.kappa - M_PI / 4.0) > 1e-9)
    throw std::domain_error("resonant closed form requires kappa = pi/4");
  if (!p.analytic_capable)
    throw std::domain_error(
        "resonant closed form requires chi = -pi/4 - 2*pi*n");
}

} // namespace

double resonant_omega_tun(const SystemParams& p, int N) {
  require_sector(N);
  require_resonant(p);
  const double D = p.tunnel_split;
  return std::sqrt(D * D + N * p.g * p.g);
}

double resonant_rho_LL(const SystemParams& p, int N, double t) {
  require_sector(N);
  require_resonant(p);
  const double D = p.tunnel_split;
  const double amp = (D == 0.0) ? 0.0 : D * D / (D * D + N * p.g * p.g);
  const double s = std::sin(resonant_omega_tun(p, N) * t / 2.0);
  return amp * s * s;
}

double resonant_rho_ee(const SystemParams& p, int N, double t) {
  require_sector(N);
  require_resonant(p);
  const double D = p.tunnel_split;
  const auto f = frequencies(p.g, 0.0, D, p.kappa, p.chi, N);
  const double denom = 8.0 * (N * p.g * p.g + D * D);
  const double num =
      (f.plus * f.plus - D * D) * std::cos(f.plus * t) +
      (f.minus * f.minus - D * D) * std::cos(f.minus * t) +
      4.0 * D * D * std::cos((f.plus - f.minus) / 2.0 * t);
  return 0.5 + num / denom;
}

double far_detuned_effective(const SystemParams& p, int N) {
  require_sector(N);
  if (p.delta == 0.0)
    throw std::domain_error("two-photon effective rate requires delta != 0");
  const double D = p.tunnel_split;
  const double Ng2 = N * p.g * p.g;
  const double W = std::sqrt(p.delta * p.delta * D * D +
                             Ng2 * Ng2 * std::pow(std::sin(2.0 * p.kappa), 2));
  return W / p.delta;
}

double far_detuned_rho_LL(const SystemParams& p, int N, double t) {
  const double obar = far_detuned_effective(p, N); // also validates N, delta
  const double D = p.tunnel_split;
  const double W = p.delta * obar;
  if (W == 0.0) return 0.5; // no tunnel splitting and no two-photon channel
  const double coeff = N * p.delta * D * std::sin(2.0 * p.kappa) * p.g * p.g /
                       (2.0 * W * W);
  return 0.5 - coeff * (1.0 - std::cos(obar * t));
}

} // namespace cavtun
