#include "ewhi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ewhi/errors.hpp"
#include "ewhi/normal.hpp"

namespace ewhi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double reflect_into(double v, double lo, double hi) {
  if (v < lo) v = lo + (lo - v);
  if (v > hi) v = hi - (v - hi);
  return std::clamp(v, lo, hi);
}

Eigen::VectorXd uniform_point(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd x(lower.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = lower(j) + (upper(j) - lower(j)) * unif(rng);
  return x;
}

// Feasibility times prod over front points of P(not dominated-or-equalled by that point).
double candidate_score(const Surrogates& models, const ParetoState& pareto, const Eigen::VectorXd& x) {
  const PredictiveDistribution pred = models.predict_objectives(x);
  double score = models.prob_feasible(x);
  for (const auto& f : pareto.front()) {
    double covered = 1.0;
    for (std::size_t i = 0; i < pred.dimension(); ++i) {
      const double sd = pred.sds[i];
      covered *= sd > 0.0 ? normal_cdf((pred.means[i] - f[i]) / sd) : (pred.means[i] >= f[i] ? 1.0 : 0.0);
    }
    score *= 1.0 - covered;
  }
  return score;
}

Observation evaluate_at(const Problem& problem, const Eigen::VectorXd& x, std::size_t iteration) {
  Observation obs;
  obs.iteration = iteration;
  obs.x = x;
  try {
    obs.evaluation = problem.evaluate(x);
  } catch (const std::exception& e) {
    throw EvaluationError("evaluation of " + problem.name + " failed at iteration " + std::to_string(iteration) +
                          ": " + e.what());
  }
  if (obs.evaluation.objectives.size() != problem.num_objectives ||
      obs.evaluation.constraints.size() != problem.num_constraints) {
    throw EvaluationError("problem " + problem.name + " returned the wrong number of outputs");
  }
  for (double v : obs.evaluation.objectives) {
    if (!std::isfinite(v)) throw EvaluationError("problem " + problem.name + " returned a non-finite objective");
  }
  obs.selected_ewhi = obs.ewhi_variance = obs.z_estimate = obs.delta_sq = kNaN;
  return obs;
}

}  // namespace

OptimizationRun::OptimizationRun(Problem p, WeightFunction w, OptimizerSettings s)
    : problem(std::move(p)), weight(std::move(w)), settings(s), pareto(problem.num_objectives) {
  if (weight.support_box().dimension() != problem.num_objectives) {
    throw DimensionError("weight function dimension differs from the number of objectives");
  }
  if (settings.n_init < 2) throw std::invalid_argument("the initial design needs at least two points");
  if (settings.m_x == 0 || settings.m_y == 0) throw std::invalid_argument("m_x and m_y must be positive");
}

double maximin_score(const std::vector<Eigen::VectorXd>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) best = std::min(best, (points[i] - points[j]).norm());
  }
  return best;
}

std::vector<Eigen::VectorXd> latin_hypercube(std::size_t n, const Eigen::VectorXd& lower,
                                             const Eigen::VectorXd& upper, Rng& rng, int tries) {
  if (n < 2) throw std::invalid_argument("latin hypercube needs n >= 2");
  const Eigen::Index d = lower.size();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::VectorXd> best;
  double best_score = -1.0;
  std::vector<std::size_t> perm(n);
  for (int t = 0; t < std::max(tries, 1); ++t) {
    std::vector<Eigen::VectorXd> design(n, Eigen::VectorXd(d));
    for (Eigen::Index j = 0; j < d; ++j) {
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t i = 0; i < n; ++i) {
        design[i](j) = (static_cast<double>(perm[i]) + unif(rng)) / static_cast<double>(n);
      }
    }
    const double score = maximin_score(design);
    if (score > best_score) {
      best_score = score;
      best = std::move(design);
    }
  }
  for (auto& x : best) x = lower.array() + (upper - lower).array() * x.array();
  return best;
}

Surrogates::Surrogates(const Problem& problem, const std::vector<Observation>& history, const FitOptions& options)
    : lower_(problem.lower), upper_(problem.upper) {
  const Eigen::Index n = static_cast<Eigen::Index>(history.size());
  Eigen::MatrixXd inputs(n, problem.dimension);
  for (Eigen::Index i = 0; i < n; ++i) inputs.row(i) = normalize(history[i].x).transpose();

  const auto fit_output = [&](auto extract, std::uint64_t salt) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = extract(history[i].evaluation);
    const double shift = y.mean();
    double scale = std::sqrt((y.array() - shift).square().mean());
    if (!(scale > 0.0)) scale = 1.0;
    const Eigen::VectorXd z = (y.array() - shift) / scale;
    FitOptions o = options;
    o.seed = options.seed + salt;
    return Scaled{fit(inputs, z, o), shift, scale};
  };
  for (std::size_t i = 0; i < problem.num_objectives; ++i) {
    objectives_.push_back(fit_output([i](const Evaluation& e) { return e.objectives[i]; }, 17 * i + 1));
  }
  for (std::size_t j = 0; j < problem.num_constraints; ++j) {
    constraints_.push_back(fit_output([j](const Evaluation& e) { return e.constraints[j]; }, 17 * j + 1001));
  }
}

Eigen::VectorXd Surrogates::normalize(const Eigen::VectorXd& x) const {
  return ((x - lower_).array() / (upper_ - lower_).array()).matrix();
}

Prediction Surrogates::predict_scaled(const Scaled& s, const Eigen::VectorXd& x) const {
  const Prediction p = s.model.predict(normalize(x));
  return {s.shift + s.scale * p.mean, s.scale * p.sd};
}

PredictiveDistribution Surrogates::predict_objectives(const Eigen::VectorXd& x) const {
  PredictiveDistribution pred;
  for (const auto& s : objectives_) {
    const Prediction p = predict_scaled(s, x);
    pred.means.push_back(p.mean);
    pred.sds.push_back(p.sd);
  }
  return pred;
}

std::vector<Prediction> Surrogates::predict_constraints(const Eigen::VectorXd& x) const {
  std::vector<Prediction> out;
  for (const auto& s : constraints_) out.push_back(predict_scaled(s, x));
  return out;
}

double Surrogates::prob_feasible(const Eigen::VectorXd& x) const {
  const auto preds = predict_constraints(x);
  return ewhi::prob_feasible(preds);
}

double Surrogates::spread(const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (const auto& s : objectives_) {
    const double sd = s.model.predict(normalize(x)).sd;
    total += sd * sd;
  }
  return total;
}

CandidateSet generate_candidates(const Surrogates& models, const ParetoState& pareto, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, std::size_t m_x, Rng& rng) {
  const std::size_t n_moved = m_x / 2;
  const std::size_t n_uniform = m_x - n_moved;
  CandidateSet set;
  set.points.reserve(m_x);
  for (std::size_t i = 0; i < n_uniform; ++i) set.points.push_back(uniform_point(lower, upper, rng));

  if (n_moved > 0) {
    std::vector<Eigen::VectorXd> pool;
    std::vector<double> scores;
    for (std::size_t i = 0; i < 2 * n_moved; ++i) {
      pool.push_back(uniform_point(lower, upper, rng));
      scores.push_back(candidate_score(models, pareto, pool.back()));
    }
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<Eigen::VectorXd> population;
    std::vector<double> weights;
    for (std::size_t i = 0; i < n_moved; ++i) {
      population.push_back(pool[order[i]]);
      weights.push_back(scores[order[i]]);
    }

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::VectorXd step = 0.05 * (upper - lower);
    for (int round = 0; round < 3; ++round) {
      if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; })) {
        std::fill(weights.begin(), weights.end(), 1.0);
      }
      const auto ancestors = systematic_resample(weights, n_moved, unif(rng));
      std::vector<Eigen::VectorXd> moved;
      moved.reserve(n_moved);
      for (std::size_t i = 0; i < n_moved; ++i) {
        Eigen::VectorXd x = population[ancestors[i]];
        for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = reflect_into(x(j) + step(j) * normal(rng), lower(j), upper(j));
        moved.push_back(std::move(x));
      }
      population = std::move(moved);
      for (std::size_t i = 0; i < n_moved; ++i) weights[i] = candidate_score(models, pareto, population[i]);
    }
    for (auto& x : population) set.points.push_back(std::move(x));
  }

  set.predictive.reserve(set.points.size());
  for (const auto& x : set.points) set.predictive.push_back(models.predict_objectives(x));
  return set;
}

ParetoState feasible_front(const std::vector<Observation>& history, std::size_t num_objectives) {
  ParetoState state(num_objectives);
  for (const auto& obs : history) {
    if (obs.evaluation.feasible()) state = update_front(state, ObjectiveVector(obs.evaluation.objectives));
  }
  return state;
}

void execute(OptimizationRun& run, const RunObserver& observer) {
  const Problem& problem = run.problem;
  const OptimizerSettings& settings = run.settings;
  Rng rng(settings.seed);

  const auto record = [&](Observation obs) {
    if (obs.evaluation.feasible()) run.pareto = update_front(run.pareto, ObjectiveVector(obs.evaluation.objectives));
    run.history.push_back(std::move(obs));
    if (observer.on_observation) observer.on_observation(run.history.back());
  };

  if (run.history.empty()) {
    for (const auto& x : latin_hypercube(settings.n_init, problem.lower, problem.upper, rng)) {
      record(evaluate_at(problem, x, 0));
    }
  }
  run.pareto = feasible_front(run.history, problem.num_objectives);

  for (std::size_t it = 1; run.history.size() < settings.budget(); ++it) {
    FitOptions fit_options;
    fit_options.starts = settings.gp_starts;
    fit_options.seed = settings.seed * 1000003ULL + it;
    const Surrogates models(problem, run.history, fit_options);

    const CandidateSet candidates = generate_candidates(models, run.pareto, problem.lower, problem.upper, settings.m_x, rng);
    std::vector<double> feasibility(candidates.size()), spread(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      feasibility[k] = models.prob_feasible(candidates.points[k]);
      spread[k] = models.spread(candidates.points[k]);
    }

    IterationDiagnostics diag;
    diag.iteration = it;
    diag.num_observations = run.history.size();
    diag.front_size = run.pareto.front().size();

    const L2OptimalDensity density = l2opt_density(candidates, run.weight, run.pareto);
    ParticleSystem system;
    try {
      system = init_particles(run.pareto, run.weight.support_box(), settings.m_y, rng);
    } catch (const SmcInitError& e) {
      throw SmcInitError("iteration " + std::to_string(it) + ": " + e.what());
    }

    std::vector<EwhiEstimate> estimates(candidates.size());
    try {
      system = run_smc(std::move(system), density, rng, settings.smc);
      estimates = estimate_batch(candidates, system, density);
    } catch (const DegenerateTargetError& e) {
      diag.note = e.what();
    }

    const Selection sel = select_next(estimates, feasibility, spread);
    const EwhiEstimate& chosen = estimates[sel.index];
    diag.z_estimate = system.z_estimate;
    diag.delta_sq = system.delta_sq_cum;
    diag.smc_stages = system.stage;
    diag.selected_index = sel.index;
    diag.acquisition = chosen.value;
    diag.variance = chosen.variance;
    diag.feasibility = feasibility[sel.index];
    diag.fallback = sel.used_fallback;
    if (sel.used_fallback && diag.note.empty()) diag.note = "all acquisition scores are zero; picked the largest predictive variance";

    Observation obs = evaluate_at(problem, candidates.points[sel.index], it);
    obs.selected_ewhi = chosen.value;
    obs.ewhi_variance = chosen.variance;
    obs.z_estimate = system.z_estimate;
    obs.delta_sq = system.delta_sq_cum;
    record(std::move(obs));

    run.diagnostics.push_back(diag);
    if (observer.on_iteration) observer.on_iteration(run.diagnostics.back());
  }
}

OptimizationRun run(OptimizationRun state, const RunObserver& observer) {
  execute(state, observer);
  return state;
}

}  // namespace ewhi
