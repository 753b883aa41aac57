#include "cavtun/params.hpp"

#include <cmath>
#include <stdexcept>

namespace cavtun {

bool chi_on_analytic_lattice(double chi) {
  // chi = -pi/4 - 2*pi*n for integer n, up to rounding noise.
  const double two_pi = 2.0 * M_PI;
  const double n = (-M_PI / 4.0 - chi) / two_pi;
  return std::abs(n - std::round(n)) * two_pi < 1e-9;
}

SystemParams make_params(double g, double delta, double tunnel_split,
                         double kappa, double chi, double half_sep) {
  if (!(std::isfinite(g) && std::isfinite(delta) && std::isfinite(tunnel_split) &&
        std::isfinite(kappa) && std::isfinite(chi) && std::isfinite(half_sep)))
    throw std::domain_error("system parameters must be finite");
  if (g <= 0.0) throw std::domain_error("coupling g must be positive");
  if (tunnel_split < 0.0)
    throw std::domain_error("tunnel splitting must be nonnegative");
  if (half_sep <= 0.0)
    throw std::domain_error("well half-separation b/2 must be positive");

  SystemParams p;
  p.g = g;
  p.delta = delta;
  p.tunnel_split = tunnel_split;
  p.kappa = kappa;
  p.chi = chi;
  p.half_sep = half_sep;
  p.analytic_capable = chi_on_analytic_lattice(chi);
  return p;
}

} // namespace cavtun
