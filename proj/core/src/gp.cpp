#include "ewhi/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ewhi/errors.hpp"
#include "ewhi/normal.hpp"

namespace ewhi {

namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873127623544061835961153;
constexpr double kLog2Pi = 1.83787706640934548356065947281123527972279494727556;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double matern52_from_r(double r, double variance) {
  const double s = kSqrt5 * r;
  return variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double scaled_distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                       const Eigen::VectorXd& lengthscales) {
  return ((a - b).array() / lengthscales.array()).matrix().norm();
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& inputs, const KernelParams& params) {
  const Eigen::Index n = inputs.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = params.signal_variance + params.nugget;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = scaled_distance(inputs.row(i).transpose(), inputs.row(j).transpose(), params.lengthscales);
      k(i, j) = k(j, i) = matern52_from_r(r, params.signal_variance);
    }
  }
  return k;
}

// Generalized-least-squares constant mean: (1' K^-1 y) / (1' K^-1 1).
double gls_mean(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& outputs) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(outputs.size());
  const Eigen::VectorXd kinv_ones = llt.solve(ones);
  return kinv_ones.dot(outputs) / kinv_ones.sum();
}

Eigen::VectorXd clamp_to_prior(const Eigen::VectorXd& u, const HyperPrior& prior) {
  constexpr double kWidth = 6.0;
  Eigen::VectorXd out = u;
  out(0) = std::clamp(u(0), prior.log_variance_mean - kWidth * prior.log_variance_sd,
                      prior.log_variance_mean + kWidth * prior.log_variance_sd);
  for (Eigen::Index j = 1; j < u.size(); ++j) {
    const double mu = prior.log_lengthscale_mean(j - 1);
    const double sd = prior.log_lengthscale_sd(j - 1);
    out(j) = std::clamp(u(j), mu - kWidth * sd, mu + kWidth * sd);
  }
  return out;
}

struct Optimum {
  Eigen::VectorXd u;
  double value = kNegInf;
};

// BFGS ascent with Armijo backtracking, iterates clamped to the prior box.
Optimum maximize(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, const HyperPrior& prior,
                 Eigen::VectorXd u, double relative_nugget, int max_iterations) {
  const Eigen::Index dim = u.size();
  Eigen::VectorXd g(dim);
  double f = -log_posterior(inputs, outputs, prior, u, relative_nugget, &g);
  g = -g;
  if (!std::isfinite(f)) return {u, kNegInf};

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd g_new(dim);
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() < 1e-6) break;
    Eigen::VectorXd p = -h * g;
    if (g.dot(p) >= 0.0) {
      h.setIdentity();
      p = -g;
    }
    const double p_max = p.lpNorm<Eigen::Infinity>();
    double step = p_max > 2.0 ? 2.0 / p_max : 1.0;

    Eigen::VectorXd u_new;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
      u_new = clamp_to_prior(u + step * p, prior);
      f_new = -log_posterior(inputs, outputs, prior, u_new, relative_nugget, &g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(u_new - u)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    g_new = -g_new;

    const Eigen::VectorXd s = u_new - u;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    const double decrease = f - f_new;
    u = u_new;
    f = f_new;
    g = g_new;
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      h = (eye - rho * s * y.transpose()) * h * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    if (decrease < 1e-10 * (1.0 + std::abs(f))) break;
  }
  return {u, -f};
}

}  // namespace

double matern52(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                const KernelParams& params) {
  return matern52_from_r(scaled_distance(a, b, params.lengthscales), params.signal_variance);
}

HyperPrior HyperPrior::defaults_for(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs) {
  HyperPrior prior;
  const Eigen::Index d = inputs.cols();
  prior.log_lengthscale_mean.resize(d);
  prior.log_lengthscale_sd = Eigen::VectorXd::Ones(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double range = inputs.col(j).maxCoeff() - inputs.col(j).minCoeff();
    if (!(range > 0.0)) range = 1.0;
    prior.log_lengthscale_mean(j) = std::log(0.3 * range);
  }
  const double mean = outputs.mean();
  double var = (outputs.array() - mean).square().mean();
  if (!(var > 1e-300)) var = 1.0;
  prior.log_variance_mean = std::log(var);
  prior.log_variance_sd = 1.0;
  return prior;
}

Eigen::VectorXd pack_log_params(double signal_variance, const Eigen::VectorXd& lengthscales) {
  Eigen::VectorXd u(lengthscales.size() + 1);
  u(0) = std::log(signal_variance);
  u.tail(lengthscales.size()) = lengthscales.array().log().matrix();
  return u;
}

double log_posterior(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, const HyperPrior& prior,
                     const Eigen::VectorXd& log_params, double relative_nugget, Eigen::VectorXd* gradient) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index d = inputs.cols();
  KernelParams params;
  params.signal_variance = std::exp(log_params(0));
  params.lengthscales = log_params.tail(d).array().exp().matrix();
  params.nugget = relative_nugget * params.signal_variance;

  const Eigen::MatrixXd k = kernel_matrix(inputs, params);
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return kNegInf;
  const Eigen::MatrixXd l = llt.matrixL();
  if ((l.diagonal().array() <= 0.0).any()) return kNegInf;

  const double beta = gls_mean(llt, outputs);
  const Eigen::VectorXd resid = outputs.array() - beta;
  const Eigen::VectorXd alpha = llt.solve(resid);

  double value = -0.5 * resid.dot(alpha) - l.diagonal().array().log().sum() - 0.5 * static_cast<double>(n) * kLog2Pi;

  const auto log_prior_term = [](double u, double mu, double sd) {
    const double z = (u - mu) / sd;
    return -u - std::log(sd) - 0.5 * kLog2Pi - 0.5 * z * z;
  };
  value += log_prior_term(log_params(0), prior.log_variance_mean, prior.log_variance_sd);
  for (Eigen::Index j = 0; j < d; ++j) {
    value += log_prior_term(log_params(j + 1), prior.log_lengthscale_mean(j), prior.log_lengthscale_sd(j));
  }
  if (!std::isfinite(value)) return kNegInf;

  if (gradient != nullptr) {
    gradient->resize(d + 1);
    // The profiled mean is a stationary point in beta, so only dK terms remain:
    // dL/du = 0.5 (alpha' dK alpha - tr(K^-1 dK)).
    const Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd w = alpha * alpha.transpose() - kinv;
    (*gradient)(0) = 0.5 * (w.array() * k.array()).sum();
    (*gradient)(0) += -1.0 - (log_params(0) - prior.log_variance_mean) /
                                 (prior.log_variance_sd * prior.log_variance_sd);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double ell2 = params.lengthscales(j) * params.lengthscales(j);
      double acc = 0.0;
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < a; ++b) {
          const double r = scaled_distance(inputs.row(a).transpose(), inputs.row(b).transpose(), params.lengthscales);
          const double s = kSqrt5 * r;
          const double diff = inputs(a, j) - inputs(b, j);
          const double dk = params.signal_variance * (5.0 / 3.0) * (1.0 + s) * std::exp(-s) * diff * diff / ell2;
          acc += 2.0 * w(a, b) * dk;
        }
      }
      const double sd = prior.log_lengthscale_sd(j);
      (*gradient)(j + 1) = 0.5 * acc - 1.0 - (log_params(j + 1) - prior.log_lengthscale_mean(j)) / (sd * sd);
    }
  }
  return value;
}

GpModel::GpModel(Eigen::MatrixXd inputs, Eigen::VectorXd outputs, KernelParams params, double max_relative_nugget)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), params_(std::move(params)) {
  if (inputs_.rows() != outputs_.size() || inputs_.rows() < 1) {
    throw DimensionError("GP inputs and outputs must have the same positive length");
  }
  if (params_.lengthscales.size() != inputs_.cols()) {
    throw DimensionError("one lengthscale per input dimension is required");
  }
  const double floor = 1e-12 * params_.signal_variance;
  const double ceiling = max_relative_nugget * params_.signal_variance;
  params_.nugget = std::max(params_.nugget, floor);
  for (;;) {
    llt_.compute(kernel_matrix(inputs_, params_));
    if (llt_.info() == Eigen::Success && (llt_.matrixLLT().diagonal().array() > 0.0).all()) break;
    if (params_.nugget * 10.0 > ceiling * (1.0 + 1e-9)) {
      throw FitError("kernel matrix is not positive definite even with nugget " + std::to_string(params_.nugget));
    }
    params_.nugget *= 10.0;
  }
  mean_constant_ = gls_mean(llt_, outputs_);
  alpha_ = llt_.solve((outputs_.array() - mean_constant_).matrix());
}

Prediction GpModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::Index n = inputs_.rows();
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) kstar(i) = matern52(x, inputs_.row(i).transpose(), params_);
  const double mean = mean_constant_ + kstar.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(kstar);
  const double var = params_.signal_variance - v.squaredNorm();
  return {mean, std::sqrt(std::max(var, 0.0))};
}

Prediction predict(const GpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) { return model.predict(x); }

GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, const HyperPrior& prior,
            const FitOptions& options) {
  if (inputs.rows() < 2) throw FitError("at least two design points are required to fit a GP");
  if (!outputs.allFinite()) throw FitError("GP outputs must be finite");
  const Eigen::Index d = inputs.cols();

  Rng rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd median(d + 1);
  median(0) = prior.log_variance_mean;
  median.tail(d) = prior.log_lengthscale_mean;
  starts.push_back(median);
  for (int s = 1; s < options.starts; ++s) {
    Eigen::VectorXd u(d + 1);
    u(0) = prior.log_variance_mean + prior.log_variance_sd * normal(rng);
    for (Eigen::Index j = 0; j < d; ++j) {
      u(j + 1) = prior.log_lengthscale_mean(j) + prior.log_lengthscale_sd(j) * normal(rng);
    }
    starts.push_back(u);
  }

  Optimum best;
  double best_nugget = options.relative_nugget;
  for (const auto& start : starts) {
    for (double rel = options.relative_nugget; rel <= options.max_relative_nugget * (1.0 + 1e-9); rel *= 10.0) {
      if (!std::isfinite(log_posterior(inputs, outputs, prior, start, rel))) continue;
      Optimum opt = maximize(inputs, outputs, prior, start, rel, options.max_iterations);
      if (opt.value > best.value) {
        best = opt;
        best_nugget = rel;
      }
      break;
    }
  }
  if (!std::isfinite(best.value)) {
    throw FitError("no hyperparameter start gives a factorizable kernel matrix");
  }

  KernelParams params;
  params.signal_variance = std::exp(best.u(0));
  params.lengthscales = best.u.tail(d).array().exp().matrix();
  params.nugget = best_nugget * params.signal_variance;
  return GpModel(inputs, outputs, params, options.max_relative_nugget);
}

GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs, const FitOptions& options) {
  return fit(inputs, outputs, HyperPrior::defaults_for(inputs, outputs), options);
}

double prob_dominates(const PredictiveDistribution& pred, std::span<const double> y) {
  const std::size_t p = pred.means.size();
  if (y.size() != p || pred.sds.size() != p) {
    throw DimensionError("predictive distribution and objective vector dimensions differ");
  }
  double product = 1.0;
  bool tiny = false;
  for (std::size_t i = 0; i < p; ++i) {
    const double sd = pred.sds[i];
    double factor;
    if (sd > 0.0) {
      factor = normal_cdf((y[i] - pred.means[i]) / sd);
      tiny = tiny || factor < 1e-300;
    } else {
      factor = y[i] >= pred.means[i] ? 1.0 : 0.0;
    }
    if (factor == 0.0 && !(sd > 0.0)) return 0.0;
    product *= factor;
  }
  if (!tiny) return product;

  double log_sum = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    if (pred.sds[i] > 0.0) log_sum += log_normal_cdf((y[i] - pred.means[i]) / pred.sds[i]);
  }
  return std::exp(log_sum);
}

double prob_feasible(std::span<const Prediction> constraint_preds) {
  double product = 1.0;
  for (const auto& c : constraint_preds) {
    if (c.sd > 0.0) {
      product *= normal_cdf(-c.mean / c.sd);
    } else if (c.mean > 0.0) {
      return 0.0;
    }
  }
  return product;
}

}  // namespace ewhi
