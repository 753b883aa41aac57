#include "cavtun/state.hpp"

#include <cmath>

namespace cavtun {

namespace {
constexpr double inv_sqrt2 = 0.70710678118654752440;
}

std::array<complex, 2> basis_change_well(const std::array<complex, 2>& pm) {
  return {(pm[0] - pm[1]) * inv_sqrt2, (pm[0] + pm[1]) * inv_sqrt2};
}

std::array<complex, 2> basis_change_pm(const std::array<complex, 2>& lr) {
  return {(lr[0] + lr[1]) * inv_sqrt2, (lr[1] - lr[0]) * inv_sqrt2};
}

double CompositeState::norm_sq() const {
  double s = std::norm(ground[0]) + std::norm(ground[1]);
  for (const auto& a : sectors) s += a.squaredNorm();
  return s;
}

double CompositeState::norm() const { return std::sqrt(norm_sq()); }

double overlap_sq(const CompositeState& a, const CompositeState& b) {
  complex ov = std::conj(a.ground[0]) * b.ground[0] +
               std::conj(a.ground[1]) * b.ground[1];
  const std::size_t common = std::min(a.sectors.size(), b.sectors.size());
  for (std::size_t i = 0; i < common; ++i)
    ov += a.sectors[i].dot(b.sectors[i]); // Eigen's dot conjugates the left arg
  return std::norm(ov);
}

} // namespace cavtun
