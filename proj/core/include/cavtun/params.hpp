#ifndef CAVTUN_PARAMS_HPP
#define CAVTUN_PARAMS_HPP

namespace cavtun {

// Model constants, hbar = 1, all rates angular frequencies.
//
// The cavity standing mode E(x) ~ sin(k(x - x0)) enters only through the
// two dimensionless angles kappa = k*b/2 and chi = k*x0, where b is the
// distance between the doublet wells. The absolute frequencies omega and
// omega0 never appear individually: the detuning delta = omega - omega0
// carries all of their observable content, and the leftover global sector
// phase is gauged away (see sector.hpp).
struct SystemParams {
  double g = 1.0;            // atom-field coupling strength
  double delta = 0.0;        // cavity-atom detuning, omega - omega0
  double tunnel_split = 0.0; // bare tunnel splitting of the well doublet
  double kappa = 0.0;        // k * b/2
  double chi = 0.0;          // k * x0
  double half_sep = 1.0;     // b/2; scales <x> only
  // True when chi sits on the lattice -pi/4 - 2*pi*n where the closed-form
  // propagator applies; other chi are served by the numerical propagator.
  bool analytic_capable = false;
};

// Validates and assembles the parameter record.
// Throws std::domain_error on g <= 0, tunnel_split < 0, half_sep <= 0, or
// any non-finite field.
SystemParams make_params(double g, double delta, double tunnel_split,
                         double kappa, double chi, double half_sep = 1.0);

bool chi_on_analytic_lattice(double chi);

} // namespace cavtun

#endif
