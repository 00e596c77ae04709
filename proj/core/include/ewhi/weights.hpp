#pragma once

#include <array>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ewhi/pareto.hpp"

namespace ewhi {

/// Non-negative preference weight omega defining the measure mu(dy) = omega(y) dy.
///
/// The support box bounds the region used to initialize objective-space
/// sampling; omega is treated as zero outside it. Weights are unnormalized.
class WeightFunction {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  WeightFunction(std::string name, Fn fn, BoundingBox support_box);

  double operator()(std::span<const double> y) const { return fn_(y); }
  double operator()(const ObjectiveVector& y) const { return fn_(y.values()); }

  const std::string& name() const { return name_; }
  const BoundingBox& support_box() const { return support_box_; }

  /// c * omega with the same support.
  WeightFunction scaled(double c) const;

 private:
  std::string name_;
  Fn fn_;
  BoundingBox support_box_;
};

/// (1/15) exp(-y1/15) 1[0,150](y1)/150 1[0,60](y2)/60.
double omega1(std::span<const double> y);

/// Equal mixture of two bivariate Gaussians at (80,20) and (30,40) with
/// covariance RS(RS)^T, R the pi/4 rotation and S = diag(20, 3).
double omega2(std::span<const double> y);

struct ExponentialWeightParams {
  double scale = 15.0;        // mean of the exponential preference
  std::size_t objective = 0;  // preferred objective
  BoundingBox box{{0.0, 0.0}, {150.0, 60.0}};
};

struct GaussianMixtureParams {
  std::vector<std::array<double, 2>> means{{80.0, 20.0}, {30.0, 40.0}};
  double angle = std::numbers::pi / 4.0;
  std::array<double, 2> scales{20.0, 3.0};
  BoundingBox box{{0.0, 0.0}, {150.0, 60.0}};
};

/// Covariance (RS)(RS)^T, row-major {c00, c01, c10, c11}.
std::array<double, 4> mixture_covariance(double angle, const std::array<double, 2>& scales);

/// Exponential preference on one objective times uniform densities on the box.
/// Default parameters reproduce omega1 exactly.
WeightFunction exponential_weight(const ExponentialWeightParams& params = {});

/// Equal-weight bivariate Gaussian mixture. Default parameters reproduce omega2.
WeightFunction gaussian_mixture_weight(const GaussianMixtureParams& params = {});

/// omega = 1 on the box, 0 outside. Turns EWHI into EHVI.
WeightFunction uniform_box_weight(const BoundingBox& box);

}  // namespace ewhi
