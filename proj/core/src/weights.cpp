#include "ewhi/weights.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ewhi/errors.hpp"

namespace ewhi {

namespace {

void require_dimension(std::span<const double> y, std::size_t p) {
  if (y.size() != p) throw DimensionError("weight function expects " + std::to_string(p) + " objectives");
}

double exponential_value(const ExponentialWeightParams& params, std::span<const double> y) {
  require_dimension(y, params.box.dimension());
  if (!params.box.contains(y)) return 0.0;
  const std::size_t j = params.objective;
  double value = (1.0 / params.scale) * std::exp(-(y[j] - params.box.lower[j]) / params.scale);
  for (std::size_t i = 0; i < y.size(); ++i) value *= 1.0 / (params.box.upper[i] - params.box.lower[i]);
  return value;
}

struct Mixture {
  std::vector<std::array<double, 2>> means;
  std::array<double, 4> precision;  // C^{-1}
  double normalizer;                // 1 / (2 pi sqrt(det C))
  BoundingBox box;

  explicit Mixture(const GaussianMixtureParams& params) : means(params.means), box(params.box) {
    if (means.empty()) throw std::invalid_argument("gaussian mixture needs at least one mean");
    const auto c = mixture_covariance(params.angle, params.scales);
    const double det = c[0] * c[3] - c[1] * c[2];
    if (!(det > 0.0)) throw std::invalid_argument("mixture covariance must be positive definite");
    precision = {c[3] / det, -c[1] / det, -c[2] / det, c[0] / det};
    normalizer = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  }

  double operator()(std::span<const double> y) const {
    require_dimension(y, 2);
    double sum = 0.0;
    for (const auto& mu : means) {
      const double d0 = y[0] - mu[0];
      const double d1 = y[1] - mu[1];
      const double q = d0 * (precision[0] * d0 + precision[1] * d1) + d1 * (precision[2] * d0 + precision[3] * d1);
      sum += normalizer * std::exp(-0.5 * q);
    }
    return sum / static_cast<double>(means.size());
  }
};

}  // namespace

WeightFunction::WeightFunction(std::string name, Fn fn, BoundingBox support_box)
    : name_(std::move(name)), fn_(std::move(fn)), support_box_(std::move(support_box)) {}

WeightFunction WeightFunction::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("weight scale factor must be positive");
  return WeightFunction(name_, [fn = fn_, c](std::span<const double> y) { return c * fn(y); }, support_box_);
}

double omega1(std::span<const double> y) {
  static const ExponentialWeightParams defaults{};
  return exponential_value(defaults, y);
}

double omega2(std::span<const double> y) {
  static const Mixture defaults{GaussianMixtureParams{}};
  return defaults(y);
}

std::array<double, 4> mixture_covariance(double angle, const std::array<double, 2>& scales) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  // RS = [[c*s0, -s*s1], [s*s0, c*s1]]
  const double a = c * scales[0], b = -s * scales[1];
  const double e = s * scales[0], f = c * scales[1];
  return {a * a + b * b, a * e + b * f, e * a + f * b, e * e + f * f};
}

WeightFunction exponential_weight(const ExponentialWeightParams& params) {
  if (!(params.scale > 0.0)) throw std::invalid_argument("exponential weight scale must be positive");
  if (params.objective >= params.box.dimension()) throw std::invalid_argument("preferred objective out of range");
  return WeightFunction(
      "exponential", [params](std::span<const double> y) { return exponential_value(params, y); }, params.box);
}

WeightFunction gaussian_mixture_weight(const GaussianMixtureParams& params) {
  if (params.box.dimension() != 2) throw UnsupportedDimensionError("gaussian mixture weight is two-dimensional");
  return WeightFunction("gaussian-mixture", Mixture(params), params.box);
}

WeightFunction uniform_box_weight(const BoundingBox& box) {
  return WeightFunction(
      "uniform",
      [box](std::span<const double> y) {
        require_dimension(y, box.dimension());
        return box.contains(y) ? 1.0 : 0.0;
      },
      box);
}

}  // namespace ewhi
