#include "ewhi/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ewhi/errors.hpp"

namespace ewhi {

namespace {

// Running sums of q = omega P / gamma over the particle sample.
struct Accumulator {
  explicit Accumulator(std::size_t k) : sum(k, 0.0), sum_sq(k, 0.0), cross(k, 0.0) {}
  std::vector<double> sum, sum_sq, cross;
  double total_weight = 0.0, total_weight_sq = 0.0;
};

void add(Accumulator& acc, const ParticleSystem& system, std::size_t i, std::size_t k, double q) {
  if (system.equally_weighted()) {
    acc.sum[k] += q;
    acc.sum_sq[k] += q * q;
  } else {
    const double wi = system.weights[i];
    acc.sum[k] += wi * q;
    acc.sum_sq[k] += wi * wi * q * q;
    acc.cross[k] += wi * wi * q;
  }
}

void add_weight(Accumulator& acc, const ParticleSystem& system, std::size_t i) {
  if (system.equally_weighted()) return;
  acc.total_weight += system.weights[i];
  acc.total_weight_sq += system.weights[i] * system.weights[i];
}

std::vector<EwhiEstimate> finish(const Accumulator& acc, const ParticleSystem& system) {
  const double m = static_cast<double>(system.size());
  std::vector<EwhiEstimate> out(acc.sum.size());
  for (std::size_t k = 0; k < acc.sum.size(); ++k) {
    EwhiEstimate& e = out[k];
    if (system.equally_weighted()) {
      e.alpha_hat = acc.sum[k] / m;
      e.lambda_sq = acc.sum[k] > 0.0 ? acc.sum_sq[k] / (acc.sum[k] * acc.sum[k]) - 1.0 / m : 0.0;
    } else {
      const double a = acc.sum[k] / acc.total_weight;
      e.alpha_hat = a;
      // sum W^2 (q - a)^2 / (a sum W)^2
      const double spread = acc.sum_sq[k] - 2.0 * a * acc.cross[k] + a * a * acc.total_weight_sq;
      e.lambda_sq = a > 0.0 ? std::max(0.0, spread) / (acc.sum[k] * acc.sum[k]) : 0.0;
    }
    e.value = system.z_estimate * e.alpha_hat;
    const double cv = e.lambda_sq + (1.0 + e.lambda_sq) * system.delta_sq_cum;
    e.variance = std::max(0.0, e.value * e.value * cv);
  }
  return out;
}

}  // namespace

double ewhi_integrand(const PredictiveDistribution& pred, const ObjectiveVector& y, const WeightFunction& w) {
  return w(y) * prob_dominates(pred, y);
}

L2OptimalDensity::L2OptimalDensity(const CandidateSet& candidates, WeightFunction weight, ParetoState pareto)
    : num_candidates_(candidates.size()),
      dimension_(pareto.dimension()),
      predictive_(candidates.predictive),
      weight_(std::move(weight)),
      pareto_(std::move(pareto)) {
  if (num_candidates_ == 0) throw std::invalid_argument("at least one candidate is required");
  for (const auto& pred : predictive_) {
    if (pred.means.size() != dimension_ || pred.sds.size() != dimension_) {
      throw DimensionError("candidate prediction dimension differs from the front dimension");
    }
    for (double s : pred.sds) {
      if (!std::isfinite(s) || s < 0.0) throw std::invalid_argument("predictive sds must be finite and >= 0");
    }
  }
}

double L2OptimalDensity::operator()(const ObjectiveVector& y) const {
  if (pareto_.in_dominated_region(y)) return 0.0;
  const double omega = weight_(y);
  if (omega == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& pred : predictive_) {
    const double prob = prob_dominates(pred, y);
    sum += prob * prob;
  }
  return omega * std::sqrt(sum);
}

double L2OptimalDensity::integrands(const ObjectiveVector& y, std::span<double> out) const {
  if (out.size() != num_candidates_) throw DimensionError("integrand buffer size differs from candidate count");
  if (pareto_.in_dominated_region(y)) {
    std::fill(out.begin(), out.end(), 0.0);
    return 0.0;
  }
  const double omega = weight_(y);
  double sum = 0.0;
  for (std::size_t k = 0; k < num_candidates_; ++k) {
    const double prob = prob_dominates(predictive_[k], y);
    out[k] = omega * prob;
    sum += prob * prob;
  }
  return omega == 0.0 ? 0.0 : omega * std::sqrt(sum);
}

L2OptimalDensity l2opt_density(const CandidateSet& candidates, const WeightFunction& w, const ParetoState& pareto) {
  return L2OptimalDensity(candidates, w, pareto);
}

std::vector<EwhiEstimate> estimate_batch(const CandidateSet& candidates, const ParticleSystem& system,
                                         const L2OptimalDensity& density) {
  if (candidates.size() != density.num_candidates()) {
    throw DimensionError("density was built for a different candidate set");
  }
  const std::size_t k_count = candidates.size();
  Accumulator acc(k_count);
  std::vector<double> buf(k_count);
  for (std::size_t i = 0; i < system.size(); ++i) {
    if (!system.equally_weighted() && system.weights[i] == 0.0) continue;
    const double gamma = density.integrands(system.particles[i], buf);
    if (!(gamma > 0.0)) throw InconsistentSampleError("sampling density is zero at a particle");
    add_weight(acc, system, i);
    for (std::size_t k = 0; k < k_count; ++k) add(acc, system, i, k, buf[k] / gamma);
  }
  return finish(acc, system);
}

std::vector<EwhiEstimate> estimate_batch(const CandidateSet& candidates, const ParticleSystem& system,
                                         const TargetDensity& gamma, const WeightFunction& w) {
  const std::size_t k_count = candidates.size();
  Accumulator acc(k_count);
  for (std::size_t i = 0; i < system.size(); ++i) {
    if (!system.equally_weighted() && system.weights[i] == 0.0) continue;
    const auto& y = system.particles[i];
    const double g = gamma(y);
    if (!(g > 0.0)) throw InconsistentSampleError("sampling density is zero at a particle");
    const double omega = w(y);
    add_weight(acc, system, i);
    for (std::size_t k = 0; k < k_count; ++k) add(acc, system, i, k, omega * prob_dominates(candidates.predictive[k], y) / g);
  }
  return finish(acc, system);
}

Selection select_next(std::span<const EwhiEstimate> estimates, std::span<const double> feasibility,
                      std::span<const double> fallback_scores) {
  if (estimates.empty()) throw std::invalid_argument("no candidates to select from");
  if (estimates.size() != feasibility.size()) throw DimensionError("estimates and feasibility lengths differ");
  Selection best;
  double best_score = 0.0;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const double score = estimates[k].value * feasibility[k];
    if (score > best_score) {
      best_score = score;
      best.index = k;
    }
  }
  if (best_score > 0.0) return best;

  best.used_fallback = true;
  best.index = 0;
  if (fallback_scores.size() == estimates.size()) {
    best.index = static_cast<std::size_t>(
        std::distance(fallback_scores.begin(), std::max_element(fallback_scores.begin(), fallback_scores.end())));
  }
  return best;
}

}  // namespace ewhi
