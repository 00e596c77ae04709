#include "ewhi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "ewhi/estimator.hpp"
#include "ewhi/oracles.hpp"
#include "ewhi/optimizer.hpp"
#include "ewhi/problems.hpp"
#include "ewhi/smc.hpp"
#include "ewhi/weights.hpp"

namespace ewhi::verify {

namespace {

const BoundingBox kObjectiveBox{{0.0, 0.0}, {150.0, 60.0}};

WeightFunction weight_by_index(std::size_t i) {
  switch (i % 3) {
    case 0: return exponential_weight();
    case 1: return gaussian_mixture_weight();
    default: return uniform_box_weight(kObjectiveBox);
  }
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

ParetoState random_front(Rng& rng, const BoundingBox& box, std::size_t max_points) {
  ParetoState state(2);
  const auto count = std::uniform_int_distribution<std::size_t>(1, max_points)(rng);
  for (std::size_t i = 0; i < count; ++i) {
    const double w1 = box.upper[0] - box.lower[0], w2 = box.upper[1] - box.lower[1];
    state = update_front(state, ObjectiveVector{box.lower[0] + uniform(rng, 0.1, 0.9) * w1,
                                                box.lower[1] + uniform(rng, 0.1, 0.9) * w2});
  }
  return state;
}

// Mean uniform on the non-dominated part of the box, sds a random fraction of each width.
PredictiveDistribution random_prediction(Rng& rng, const ParetoState& front, const BoundingBox& box,
                                         double sd_lo, double sd_hi) {
  std::vector<double> mean(2);
  do {
    for (std::size_t i = 0; i < 2; ++i) mean[i] = uniform(rng, box.lower[i], box.upper[i]);
  } while (front.in_dominated_region(mean));
  PredictiveDistribution pred;
  pred.means = mean;
  for (std::size_t i = 0; i < 2; ++i) pred.sds.push_back(uniform(rng, sd_lo, sd_hi) * (box.upper[i] - box.lower[i]));
  return pred;
}

CandidateSet random_candidates(Rng& rng, const ParetoState& front, const BoundingBox& box, std::size_t count,
                               double sd_lo = 0.02, double sd_hi = 0.15) {
  CandidateSet set;
  for (std::size_t k = 0; k < count; ++k) {
    set.points.push_back(Eigen::VectorXd::Constant(1, static_cast<double>(k)));
    set.predictive.push_back(random_prediction(rng, front, box, sd_lo, sd_hi));
  }
  return set;
}

struct SampledEstimates {
  ParticleSystem system;
  std::vector<EwhiEstimate> estimates;
};

SampledEstimates estimate(const CandidateSet& set, const WeightFunction& w, const ParetoState& front,
                          const BoundingBox& box, std::size_t m_y, std::uint64_t seed) {
  Rng rng(seed);
  const L2OptimalDensity density = l2opt_density(set, w, front);
  ParticleSystem system = run_smc(init_particles(front, box, m_y, rng), density, rng);
  auto estimates = estimate_batch(set, system, density);
  return {std::move(system), std::move(estimates)};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

double three_sigma_equivalent_radius_sq() {
  // Mass within +-3 sd of a 1-D Gaussian; the chi-square(2) quantile at that mass.
  const double mass = std::erf(3.0 / std::sqrt(2.0));
  return -2.0 * std::log(1.0 - mass);
}

CheckResult oracle_agreement(std::size_t instances, std::size_t m_y, std::size_t nodes, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t passed = 0;
  double worst = 0.0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const WeightFunction w = weight_by_index(inst);
    const ParetoState front = random_front(rng, kObjectiveBox, 3);
    const CandidateSet set = random_candidates(rng, front, kObjectiveBox, 5);
    const auto result = estimate(set, w, front, kObjectiveBox, m_y, seed * 7919 + inst);
    bool ok = true;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double oracle = ewhi_grid_oracle(set.predictive[k], front, w, kObjectiveBox, nodes);
      const double est = result.estimates[k].value;
      const double tol = std::max(0.05 * oracle, 3.0 * std::sqrt(result.estimates[k].variance));
      const double err = std::abs(est - oracle);
      worst = std::max(worst, tol > 0.0 ? err / tol : (err > 0.0 ? INFINITY : 0.0));
      ok = ok && err <= tol;
    }
    passed += ok ? 1 : 0;
  }
  const bool pass = passed * 20 >= instances * 19;
  return {"oracle agreement (grid quadrature)", pass,
          std::to_string(passed) + "/" + std::to_string(instances) + " instances within max(5%, 3 sd); worst err/tol " +
              fmt(worst)};
}

CheckResult ehvi_reduction(std::size_t candidates, std::size_t m_y, std::uint64_t seed) {
  Rng rng(seed);
  const BoundingBox front_box{{0.0, 0.0}, {10.0, 10.0}};
  // Lower corner far enough below every mean that the truncation is invisible.
  const BoundingBox box{{-20.0, -20.0}, {10.0, 10.0}};
  const WeightFunction w = uniform_box_weight(box);
  constexpr std::size_t kPerFront = 5;
  std::size_t passed = 0, total = 0;
  double worst = 0.0;
  for (std::size_t inst = 0; total < candidates; ++inst) {
    const ParetoState front = random_front(rng, front_box, 3);
    CandidateSet set;
    for (std::size_t k = 0; k < kPerFront && total + k < candidates; ++k) {
      PredictiveDistribution pred = random_prediction(rng, front, front_box, 0.03, 0.2);
      set.points.push_back(Eigen::VectorXd::Zero(1));
      set.predictive.push_back(std::move(pred));
    }
    const auto result = estimate(set, w, front, box, m_y, seed * 104729 + inst);
    for (std::size_t k = 0; k < set.size(); ++k, ++total) {
      const double exact = exact_ehvi_2d(set.predictive[k], front, box.upper);
      const double err = std::abs(result.estimates[k].value - exact);
      const double sd = std::sqrt(result.estimates[k].variance);
      worst = std::max(worst, err / sd);
      passed += err <= 3.0 * sd ? 1 : 0;
    }
  }
  return {"EHVI reduction (uniform weight vs exact EHVI)", passed == total,
          std::to_string(passed) + "/" + std::to_string(total) + " candidates within 3 sd; worst |err|/sd " + fmt(worst)};
}

CheckResult single_candidate_zero_variance(std::size_t instances, std::size_t m_y, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t passed = 0;
  double worst = 0.0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const WeightFunction w = weight_by_index(inst);
    const ParetoState front = random_front(rng, kObjectiveBox, 3);
    const CandidateSet set = random_candidates(rng, front, kObjectiveBox, 1);
    const auto result = estimate(set, w, front, kObjectiveBox, m_y, seed * 31 + inst);
    const EwhiEstimate& e = result.estimates[0];
    const double dev = std::max({std::abs(e.alpha_hat - 1.0), std::abs(e.lambda_sq),
                                 std::abs(e.value - result.system.z_estimate) / result.system.z_estimate});
    worst = std::max(worst, dev);
    passed += dev <= 1e-12 ? 1 : 0;
  }
  return {"single-candidate optimal density gives alpha_hat = 1, lambda_sq = 0", passed == instances,
          std::to_string(passed) + "/" + std::to_string(instances) + " instances; max deviation " + fmt(worst)};
}

CheckResult normalizing_constant(std::size_t seeds, std::size_t m_y) {
  const ParetoState empty(2);
  const BoundingBox box{{0.0, 0.0}, {1.0, 1.0}};
  const TargetDensity half = [](const ObjectiveVector& y) { return y[0] < 0.5 ? 1.0 : 0.0; };
  const double truth = 0.5 * box.volume();
  std::vector<double> z;
  double reported_var = 0.0;
  bool monotone = true;
  for (std::size_t s = 0; s < seeds; ++s) {
    Rng rng(1000 + s);
    const ParticleSystem sys = run_smc(init_particles(empty, box, m_y, rng), half, rng);
    z.push_back(sys.z_estimate);
    reported_var += sys.z_estimate * sys.z_estimate * sys.delta_sq_cum;
    double delta = 0.0;
    for (double d : sys.cv_ledger) {
      const double next = d + (1.0 + d) * delta;
      monotone = monotone && next >= delta * (1.0 - 1e-12);
      delta = next;
    }
  }
  const double n = static_cast<double>(seeds);
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  const double empirical_var = ss / (n - 1.0);
  // Standard error combining the empirical spread and the mean reported variance.
  const double se = std::sqrt(empirical_var / n + (reported_var / n) / n);
  const bool pass = std::abs(mean - truth) <= 2.0 * se && monotone;
  return {"normalizing-constant recursion (half box)", pass,
          "mean Z " + fmt(mean) + " vs " + fmt(truth) + ", combined se " + fmt(se) +
              (monotone ? ", delta_sq monotone" : ", delta_sq NOT monotone")};
}

CheckResult variance_calibration(std::size_t instances, std::size_t replications, std::size_t m_y,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::size_t passed = 0, total = 0;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const WeightFunction w = weight_by_index(inst);
    const ParetoState front = random_front(rng, kObjectiveBox, 3);
    const CandidateSet set = random_candidates(rng, front, kObjectiveBox, 3);
    std::vector<std::vector<double>> values(set.size());
    std::vector<double> reported(set.size(), 0.0);
    for (std::size_t r = 0; r < replications; ++r) {
      const auto result = estimate(set, w, front, kObjectiveBox, m_y, seed * 1315423911ULL + inst * 100003 + r);
      for (std::size_t k = 0; k < set.size(); ++k) {
        values[k].push_back(result.estimates[k].value);
        reported[k] += result.estimates[k].variance / static_cast<double>(replications);
      }
    }
    for (std::size_t k = 0; k < set.size(); ++k, ++total) {
      const double n = static_cast<double>(replications);
      const double mean = std::accumulate(values[k].begin(), values[k].end(), 0.0) / n;
      double ss = 0.0;
      for (double v : values[k]) ss += (v - mean) * (v - mean);
      const double ratio = (ss / (n - 1.0)) / reported[k];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      passed += (ratio >= 1.0 / 3.0 && ratio <= 3.0) ? 1 : 0;
    }
  }
  return {"variance calibration (empirical / reported within factor 3)", passed == total,
          std::to_string(passed) + "/" + std::to_string(total) + " candidates; ratio range [" + fmt(lo) + ", " +
              fmt(hi) + "]"};
}

CheckResult scaling_equivariance(std::size_t instances, std::size_t m_y, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t passed = 0;
  double worst = 0.0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const WeightFunction w = weight_by_index(inst);
    const ParetoState front = random_front(rng, kObjectiveBox, 3);
    const CandidateSet set = random_candidates(rng, front, kObjectiveBox, 5);
    std::vector<double> feasibility(set.size());
    for (auto& f : feasibility) f = uniform(rng, 0.2, 1.0);
    const auto base = estimate(set, w, front, kObjectiveBox, m_y, seed + inst);
    const auto scaled = estimate(set, w.scaled(10.0), front, kObjectiveBox, m_y, seed + inst);
    bool ok = select_next(base.estimates, feasibility).index == select_next(scaled.estimates, feasibility).index;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double expect = 10.0 * base.estimates[k].value;
      const double rel = expect == 0.0 ? std::abs(scaled.estimates[k].value) : std::abs(scaled.estimates[k].value - expect) / expect;
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-12;
    }
    passed += ok ? 1 : 0;
  }
  return {"scaling equivariance (omega -> 10 omega)", passed == instances,
          std::to_string(passed) + "/" + std::to_string(instances) + " instances; max relative deviation " + fmt(worst)};
}

PreferenceReport preference_reproduction(std::size_t seeds, std::size_t m_x, std::size_t m_y, std::size_t n_init,
                                         std::size_t n_iterations, bool verbose) {
  const double r2 = three_sigma_equivalent_radius_sq();
  const GaussianMixtureParams mixture{};
  const auto cov = mixture_covariance(mixture.angle, mixture.scales);
  const double det = cov[0] * cov[3] - cov[1] * cov[2];
  const auto in_mixture_region = [&](const std::vector<double>& y) {
    for (const auto& mu : mixture.means) {
      const double d0 = y[0] - mu[0], d1 = y[1] - mu[1];
      const double q = (cov[3] * d0 * d0 - (cov[1] + cov[2]) * d0 * d1 + cov[0] * d1 * d1) / det;
      if (q <= r2) return true;
    }
    return false;
  };

  const auto run_one = [&](const WeightFunction& w, std::uint64_t seed) {
    OptimizerSettings s;
    s.n_init = n_init;
    s.n_iterations = n_iterations;
    s.m_x = m_x;
    s.m_y = m_y;
    s.seed = seed;
    OptimizationRun r(bnh(), w, s);
    execute(r);
    return r;
  };
  const auto low_f1_front_fraction = [](const OptimizationRun& r) {
    const auto& front = r.pareto.front();
    if (front.empty()) return 0.0;
    const auto low = std::count_if(front.begin(), front.end(), [](const ObjectiveVector& f) { return f[0] < 50.0; });
    return static_cast<double>(low) / static_cast<double>(front.size());
  };

  std::size_t exp_wins = 0, mixture_hits = 0;
  double low_f1_sum = 0.0;
  std::ostringstream exp_detail, mix_detail;
  for (std::size_t s = 1; s <= seeds; ++s) {
    const OptimizationRun r1 = run_one(exponential_weight(), s);
    const OptimizationRun ru = run_one(uniform_box_weight(kObjectiveBox), s);
    const OptimizationRun r2run = run_one(gaussian_mixture_weight(), s);

    const double f_exp = low_f1_front_fraction(r1), f_uni = low_f1_front_fraction(ru);
    exp_wins += f_exp > f_uni ? 1 : 0;

    std::size_t post = 0, inside = 0, low75 = 0;
    for (const auto& obs : r2run.history) {
      if (obs.iteration == 0) continue;
      ++post;
      inside += in_mixture_region(obs.evaluation.objectives) ? 1 : 0;
    }
    const double frac_mix = post ? static_cast<double>(inside) / static_cast<double>(post) : 0.0;
    mixture_hits += frac_mix >= 0.5 ? 1 : 0;

    std::size_t post1 = 0;
    for (const auto& obs : r1.history) {
      if (obs.iteration == 0) continue;
      ++post1;
      low75 += obs.evaluation.objectives[0] < 75.0 ? 1 : 0;
    }
    const double frac75 = post1 ? static_cast<double>(low75) / static_cast<double>(post1) : 0.0;
    low_f1_sum += frac75;

    exp_detail << " " << fmt(f_exp) << "/" << fmt(f_uni);
    mix_detail << " " << fmt(frac_mix);
    if (verbose) {
      std::cerr << "seed " << s << ": front f1<50 fraction omega1 " << fmt(f_exp) << " uniform " << fmt(f_uni)
                << "; omega2 in-region " << fmt(frac_mix) << "; omega1 f1<75 " << fmt(frac75) << "\n";
    }
  }
  const double n = static_cast<double>(seeds);
  const std::size_t need = (8 * seeds + 9) / 10;
  PreferenceReport report;
  report.exponential_vs_uniform = {"omega1 front share with f1 < 50 exceeds EHVI", exp_wins >= need,
                                   std::to_string(exp_wins) + "/" + std::to_string(seeds) +
                                       " seeds (omega1/uniform:" + exp_detail.str() + ")"};
  report.mixture_concentration = {"omega2 observations inside the mixture 3-sigma region", mixture_hits >= need,
                                  std::to_string(mixture_hits) + "/" + std::to_string(seeds) +
                                      " seeds with >= 50% (fractions:" + mix_detail.str() + ")"};
  report.exponential_low_f1 = {"omega1 selections with f1 < 75", low_f1_sum / n >= 0.6,
                               "mean fraction " + fmt(low_f1_sum / n)};
  return report;
}

}  // namespace ewhi::verify
