#include <doctest.h>

#include <cmath>
#include <random>

#include "cavtun/params.hpp"
#include "cavtun/state.hpp"

using namespace cavtun;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("make_params validates its inputs") {
  CHECK_NOTHROW(make_params(1.0, -3.0, 2.0, pi / 4, -pi / 4));
  CHECK_THROWS_AS(make_params(0.0, 0.0, 1.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(make_params(-1.0, 0.0, 1.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(make_params(1.0, 0.0, -1.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(make_params(1.0, 0.0, 1.0, 0.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(make_params(1.0, 0.0, 1.0, 0.0, 0.0, -2.0), std::domain_error);
  double nan = std::nan("");
  CHECK_THROWS_AS(make_params(1.0, nan, 1.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(make_params(1.0, 0.0, 1.0, HUGE_VAL, 0.0), std::domain_error);
}

TEST_CASE("analytic chi lattice is -pi/4 - 2*pi*n") {
  CHECK(chi_on_analytic_lattice(-pi / 4));
  CHECK(chi_on_analytic_lattice(-pi / 4 - 2.0 * pi));
  CHECK(chi_on_analytic_lattice(-pi / 4 + 2.0 * pi));
  CHECK_FALSE(chi_on_analytic_lattice(pi / 4));
  CHECK_FALSE(chi_on_analytic_lattice(0.0));
  CHECK_FALSE(chi_on_analytic_lattice(-pi / 4 + 1e-6));
  CHECK(make_params(1.0, 0.0, 1.0, pi / 4, -pi / 4).analytic_capable);
  CHECK_FALSE(make_params(1.0, 0.0, 1.0, pi / 4, 0.3).analytic_capable);
}

TEST_CASE("well basis change: |+-> to |L,R> and back") {
  const double s = 1.0 / std::sqrt(2.0);
  // |L> = (|+> - |->)/sqrt(2), so |+> projects equally onto both wells.
  auto lr = basis_change_well({complex{1.0}, complex{0.0}});
  CHECK(std::abs(lr[0] - s) < 1e-15);
  CHECK(std::abs(lr[1] - s) < 1e-15);
  // |-> flips the sign of the left-well amplitude.
  lr = basis_change_well({complex{0.0}, complex{1.0}});
  CHECK(std::abs(lr[0] + s) < 1e-15);
  CHECK(std::abs(lr[1] - s) < 1e-15);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    std::array<complex, 2> pm{complex{u(rng), u(rng)}, complex{u(rng), u(rng)}};
    auto back = basis_change_pm(basis_change_well(pm));
    CHECK(std::abs(back[0] - pm[0]) < 1e-14);
    CHECK(std::abs(back[1] - pm[1]) < 1e-14);
    // Unitary: norms match.
    auto lr2 = basis_change_well(pm);
    CHECK(std::norm(pm[0]) + std::norm(pm[1]) ==
          doctest::Approx(std::norm(lr2[0]) + std::norm(lr2[1])).epsilon(1e-12));
  }
}

TEST_CASE("composite state norm accumulates ground pair and sectors") {
  CompositeState s;
  s.ground = {complex{0.6}, complex{0.0, 0.8}};
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-15));
  s.sectors.push_back(Eigen::Vector4cd(0.5, 0.5, 0.5, 0.5));
  CHECK(s.norm_sq() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.max_sector() == 1);
  CHECK(s.sector(1)(0) == complex{0.5});
}

TEST_CASE("overlap_sq ignores global phase and respects orthogonality") {
  CompositeState a;
  a.ground = {complex{1.0}, complex{0.0}};
  CompositeState b = a;
  for (auto& g : b.ground) g *= std::polar(1.0, 2.1);
  CHECK(overlap_sq(a, b) == doctest::Approx(1.0).epsilon(1e-12));

  CompositeState c;
  c.ground = {complex{0.0}, complex{1.0}};
  CHECK(overlap_sq(a, c) == doctest::Approx(0.0).epsilon(1e-15));

  // Different sector counts: missing sectors count as zero amplitude.
  CompositeState d = a;
  d.sectors.push_back(Eigen::Vector4cd::Zero());
  CHECK(overlap_sq(a, d) == doctest::Approx(1.0).epsilon(1e-12));
}
