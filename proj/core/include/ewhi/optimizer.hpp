#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ewhi/estimator.hpp"
#include "ewhi/gp.hpp"
#include "ewhi/pareto.hpp"
#include "ewhi/problems.hpp"
#include "ewhi/smc.hpp"
#include "ewhi/weights.hpp"

namespace ewhi {

struct OptimizerSettings {
  std::size_t n_init = 10;
  std::size_t n_iterations = 20;
  std::size_t m_x = 1000;
  std::size_t m_y = 1000;
  std::uint64_t seed = 1;
  int gp_starts = 5;
  SmcSettings smc;

  std::size_t budget() const { return n_init + n_iterations; }
};

/// One evaluated design point. Acquisition fields are NaN for the initial design.
struct Observation {
  std::size_t iteration = 0;  // 0 for the initial design
  Eigen::VectorXd x;
  Evaluation evaluation;
  double selected_ewhi = 0.0;
  double ewhi_variance = 0.0;
  double z_estimate = 0.0;
  double delta_sq = 0.0;
};

struct IterationDiagnostics {
  std::size_t iteration = 0;
  std::size_t num_observations = 0;
  std::size_t front_size = 0;
  double z_estimate = 0.0;
  double delta_sq = 0.0;
  int smc_stages = 0;
  std::size_t selected_index = 0;
  double acquisition = 0.0;   // EWHI estimate at the selected candidate
  double variance = 0.0;
  double feasibility = 1.0;
  bool fallback = false;
  std::string note;
};

/// State of one optimization run; history grows as the run proceeds.
struct OptimizationRun {
  Problem problem;
  WeightFunction weight;
  OptimizerSettings settings;
  std::vector<Observation> history;
  ParetoState pareto{2};
  std::vector<IterationDiagnostics> diagnostics;

  OptimizationRun(Problem p, WeightFunction w, OptimizerSettings s);
};

struct RunObserver {
  std::function<void(const Observation&)> on_observation;
  std::function<void(const IterationDiagnostics&)> on_iteration;
};

/// Best-of-`tries` random Latin hypercube designs by maximin inter-point distance,
/// scaled to [lower, upper].
std::vector<Eigen::VectorXd> latin_hypercube(std::size_t n, const Eigen::VectorXd& lower,
                                             const Eigen::VectorXd& upper, Rng& rng, int tries = 100);

/// Smallest pairwise Euclidean distance.
double maximin_score(const std::vector<Eigen::VectorXd>& points);

/// Objective and constraint GPs on inputs normalized to [0,1]^d and standardized outputs.
class Surrogates {
 public:
  Surrogates(const Problem& problem, const std::vector<Observation>& history, const FitOptions& options);

  PredictiveDistribution predict_objectives(const Eigen::VectorXd& x) const;
  std::vector<Prediction> predict_constraints(const Eigen::VectorXd& x) const;
  double prob_feasible(const Eigen::VectorXd& x) const;
  /// Sum of standardized predictive variances over objectives.
  double spread(const Eigen::VectorXd& x) const;

  std::size_t num_objectives() const { return objectives_.size(); }

 private:
  struct Scaled {
    GpModel model;
    double shift;
    double scale;
  };
  Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;
  Prediction predict_scaled(const Scaled& s, const Eigen::VectorXd& x) const;

  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  std::vector<Scaled> objectives_;
  std::vector<Scaled> constraints_;
};

/// Candidate design points: half uniform on the bounds, half from three rounds of
/// resample-move (Gaussian steps of 5% of each range) on the better half of a
/// uniform pool, scored by feasibility times the probability of not being
/// dominated by any front point (front points treated independently).
CandidateSet generate_candidates(const Surrogates& models, const ParetoState& pareto, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, std::size_t m_x, Rng& rng);

/// Runs the loop in place: initial design, then per iteration refit, candidates,
/// SMC on objective space, EWHI x feasibility selection, evaluation.
/// Throws on evaluation or SMC initialization failure; history holds everything
/// evaluated so far.
void execute(OptimizationRun& run, const RunObserver& observer = {});

OptimizationRun run(OptimizationRun state, const RunObserver& observer = {});

/// Feasible objective vectors of the history.
ParetoState feasible_front(const std::vector<Observation>& history, std::size_t num_objectives);

}  // namespace ewhi
