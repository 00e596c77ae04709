#include "ewhi/normal.hpp"

#include <cmath>
#include <numbers>

namespace ewhi {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779399460599343818684758586311649;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double log_normal_cdf(double z) {
  if (z > 0.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
  if (z > -37.0) return std::log(normal_cdf(z));
  // Mills-ratio expansion: Phi(z) = phi(z)/|z| (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...).
  const double inv_z2 = 1.0 / (z * z);
  double series = 1.0, term = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= -(2.0 * k - 1.0) * inv_z2;
    series += term;
  }
  constexpr double log_inv_sqrt_2pi = -0.91893853320467274178032973640561763986139747363778;
  return log_inv_sqrt_2pi - 0.5 * z * z - std::log(-z) + std::log(series);
}

double gaussian_partial_moment(double b, double mean, double sd) {
  if (std::isinf(b)) return b > 0 ? INFINITY : 0.0;
  const double z = (b - mean) / sd;
  return sd * (z * normal_cdf(z) + normal_pdf(z));
}

}  // namespace ewhi
