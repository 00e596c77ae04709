#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ewhi::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Estimator vs grid quadrature on random instances (omega1, omega2, uniform in turn).
CheckResult oracle_agreement(std::size_t instances = 20, std::size_t m_y = 2000, std::size_t nodes = 400,
                             std::uint64_t seed = 2024);

/// Uniform-box EWHI vs exact two-objective EHVI on random candidates.
CheckResult ehvi_reduction(std::size_t candidates = 20, std::size_t m_y = 2000, std::uint64_t seed = 7);

/// Single candidate sampled from its own optimal density: alpha_hat = 1, lambda_sq = 0.
CheckResult single_candidate_zero_variance(std::size_t instances = 10, std::size_t m_y = 1000,
                                           std::uint64_t seed = 11);

/// Half-box target: mean normalizing-constant estimate vs the analytic value,
/// and monotone delta_sq_cum.
CheckResult normalizing_constant(std::size_t seeds = 200, std::size_t m_y = 1000);

/// Empirical variance of the estimate vs the reported variance, factor 3.
CheckResult variance_calibration(std::size_t instances = 5, std::size_t replications = 100,
                                 std::size_t m_y = 1000, std::uint64_t seed = 31);

/// omega -> 10 omega scales every estimate by 10 and keeps the selection.
CheckResult scaling_equivariance(std::size_t instances = 10, std::size_t m_y = 1000, std::uint64_t seed = 41);

struct PreferenceReport {
  CheckResult exponential_vs_uniform;
  CheckResult mixture_concentration;
  CheckResult exponential_low_f1;  // >= 60% of selected points have f1 < 75 on average
};

/// BNH runs over `seeds` seeds with omega1, uniform and omega2 weights.
PreferenceReport preference_reproduction(std::size_t seeds = 10, std::size_t m_x = 1000, std::size_t m_y = 1000,
                                         std::size_t n_init = 10, std::size_t n_iterations = 20,
                                         bool verbose = false);

/// Squared Mahalanobis radius enclosing 99.73% of a bivariate Gaussian.
double three_sigma_equivalent_radius_sq();

}  // namespace ewhi::verify
