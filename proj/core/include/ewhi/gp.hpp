#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ewhi/pareto.hpp"

namespace ewhi {

using Rng = std::mt19937_64;

/// Anisotropic Matern-5/2 kernel parameters.
struct KernelParams {
  double signal_variance = 1.0;
  Eigen::VectorXd lengthscales;
  double nugget = 0.0;  // absolute, added to the kernel diagonal
};

/// Matern-5/2 covariance between two design points.
double matern52(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                const KernelParams& params);

/// Independent log-normal priors on the signal variance and each lengthscale.
struct HyperPrior {
  double log_variance_mean = 0.0;
  double log_variance_sd = 1.0;
  Eigen::VectorXd log_lengthscale_mean;
  Eigen::VectorXd log_lengthscale_sd;

  /// Median lengthscale 0.3 x per-dimension input range, median variance
  /// var(outputs), unit log-scale sd for all.
  static HyperPrior defaults_for(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs);
};

struct FitOptions {
  int starts = 5;
  int max_iterations = 200;
  double relative_nugget = 1e-12;
  double max_relative_nugget = 1e-6;
  std::uint64_t seed = 0;
};

/// Packs hyperparameters as (log signal variance, log lengthscale_1..d).
Eigen::VectorXd pack_log_params(double signal_variance, const Eigen::VectorXd& lengthscales);

/// Log marginal likelihood (GLS-profiled constant mean) plus log prior density,
/// at log-parameters u. Optionally writes the analytic gradient w.r.t. u.
/// Returns -infinity if the kernel matrix cannot be factorized.
double log_posterior(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, const HyperPrior& prior,
                     const Eigen::VectorXd& log_params, double relative_nugget, Eigen::VectorXd* gradient = nullptr);

struct Prediction {
  double mean = 0.0;
  double sd = 0.0;
};

/// A stationary GP with constant mean conditioned on noiseless data.
class GpModel {
 public:
  /// Conditions on (inputs, outputs) with fixed kernel parameters. Escalates the
  /// nugget x10 up to max_relative_nugget x signal_variance on factorization failure.
  GpModel(Eigen::MatrixXd inputs, Eigen::VectorXd outputs, KernelParams params,
          double max_relative_nugget = 1e-6);

  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& outputs() const { return outputs_; }
  const KernelParams& params() const { return params_; }
  double mean_constant() const { return mean_constant_; }
  const Eigen::LLT<Eigen::MatrixXd>& factorization() const { return llt_; }

 private:
  Eigen::MatrixXd inputs_;  // one design point per row
  Eigen::VectorXd outputs_;
  KernelParams params_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double mean_constant_ = 0.0;
  Eigen::VectorXd alpha_;  // K^{-1} (y - mean)
};

/// MAP fit: multi-start BFGS on the log posterior from the prior medians plus
/// (starts - 1) random prior draws.
GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, const HyperPrior& prior,
            const FitOptions& options = {});
GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, const FitOptions& options = {});

Prediction predict(const GpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Per-objective kriging means and standard deviations at one design point.
struct PredictiveDistribution {
  std::vector<double> means;
  std::vector<double> sds;

  std::size_t dimension() const { return means.size(); }
};

/// P(xi(x) strictly dominates y) = prod_i Phi((y_i - mean_i) / sd_i).
/// A zero sd turns its factor into the indicator 1{y_i >= mean_i}.
double prob_dominates(const PredictiveDistribution& pred, std::span<const double> y);
inline double prob_dominates(const PredictiveDistribution& pred, const ObjectiveVector& y) {
  return prob_dominates(pred, y.values());
}

/// prod_j Phi(-mean_j / sd_j) for constraints g_j(x) <= 0.
double prob_feasible(std::span<const Prediction> constraint_preds);

}  // namespace ewhi
