#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ewhi/gp.hpp"
#include "ewhi/pareto.hpp"
#include "ewhi/smc.hpp"
#include "ewhi/weights.hpp"

namespace ewhi {

/// Design points where the acquisition is evaluated, with their objective predictions.
struct CandidateSet {
  std::vector<Eigen::VectorXd> points;
  std::vector<PredictiveDistribution> predictive;

  std::size_t size() const { return predictive.size(); }
};

/// Importance-sampling estimate of the EWHI at one candidate.
struct EwhiEstimate {
  double value = 0.0;       // z_estimate * alpha_hat
  double alpha_hat = 0.0;   // mean of omega * P / gamma over the particles
  double lambda_sq = 0.0;   // squared coefficient of variation of alpha_hat
  double variance = 0.0;    // value^2 (lambda_sq + (1 + lambda_sq) delta_sq_cum)
};

/// omega(y) * P(xi(x) dominates y).
double ewhi_integrand(const PredictiveDistribution& pred, const ObjectiveVector& y, const WeightFunction& w);

/// gamma(y) = omega(y) sqrt(sum_k P(xi(x_k) dominates y)^2), zero on the dominated
/// region. Minimizes the summed squared error of the per-candidate importance-sampling
/// estimates over a single shared sample.
class L2OptimalDensity {
 public:
  L2OptimalDensity(const CandidateSet& candidates, WeightFunction weight, ParetoState pareto);

  double operator()(const ObjectiveVector& y) const;

  /// Writes omega(y) P_k(y) for every candidate into out and returns gamma(y).
  /// Uses exactly the arithmetic of operator() and ewhi_integrand.
  double integrands(const ObjectiveVector& y, std::span<double> out) const;

  std::size_t num_candidates() const { return num_candidates_; }
  const WeightFunction& weight() const { return weight_; }
  const ParetoState& pareto() const { return pareto_; }

 private:
  std::size_t num_candidates_;
  std::size_t dimension_;
  std::vector<PredictiveDistribution> predictive_;
  WeightFunction weight_;
  ParetoState pareto_;
};

L2OptimalDensity l2opt_density(const CandidateSet& candidates, const WeightFunction& w, const ParetoState& pareto);

/// Per-candidate estimates from a particle system that targets density.
/// Throws InconsistentSampleError if the density vanishes at some particle.
std::vector<EwhiEstimate> estimate_batch(const CandidateSet& candidates, const ParticleSystem& system,
                                         const L2OptimalDensity& density);

/// Same estimator for an arbitrary sampling density gamma.
std::vector<EwhiEstimate> estimate_batch(const CandidateSet& candidates, const ParticleSystem& system,
                                         const TargetDensity& gamma, const WeightFunction& w);

struct Selection {
  std::size_t index = 0;
  bool used_fallback = false;
};

/// argmax of value x feasibility, lowest index on ties. When every score is zero,
/// picks the largest fallback score (e.g. predictive variance) if given, else index 0.
Selection select_next(std::span<const EwhiEstimate> estimates, std::span<const double> feasibility,
                      std::span<const double> fallback_scores = {});

}  // namespace ewhi
