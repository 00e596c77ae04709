#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "ewhi/errors.hpp"
#include "ewhi/optimizer.hpp"

using namespace ewhi;

namespace {

std::vector<int> strata(const std::vector<Eigen::VectorXd>& pts, Eigen::Index dim, double lo, double hi) {
  std::vector<int> out;
  const double n = static_cast<double>(pts.size());
  for (const auto& x : pts) out.push_back(static_cast<int>(std::floor((x(dim) - lo) / (hi - lo) * n)));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> iota_vec(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

OptimizerSettings small_settings(std::size_t iterations) {
  OptimizerSettings s;
  s.n_init = 8;
  s.n_iterations = iterations;
  s.m_x = 60;
  s.m_y = 150;
  s.gp_starts = 2;
  s.seed = 3;
  return s;
}

}  // namespace

TEST_CASE("latin hypercube strata") {
  Rng rng(1);
  Eigen::VectorXd lo1(1), hi1(1);
  lo1 << 0.0;
  hi1 << 1.0;
  const auto two = latin_hypercube(2, lo1, hi1, rng);
  CHECK(strata(two, 0, 0.0, 1.0) == iota_vec(2));

  const Eigen::Vector2d lo(0.0, 0.0), hi(5.0, 3.0);
  const auto ten = latin_hypercube(10, lo, hi, rng);
  REQUIRE(ten.size() == 10);
  CHECK(strata(ten, 0, 0.0, 5.0) == iota_vec(10));
  CHECK(strata(ten, 1, 0.0, 3.0) == iota_vec(10));
  for (const auto& x : ten) {
    CHECK((x.array() >= lo.array()).all());
    CHECK((x.array() <= hi.array()).all());
  }
  CHECK_THROWS(latin_hypercube(1, lo, hi, rng));
}

TEST_CASE("maximin selection beats a typical random design") {
  const Eigen::Vector2d lo(0.0, 0.0), hi(1.0, 1.0);
  Rng rng(7);
  const double best = maximin_score(latin_hypercube(10, lo, hi, rng, 100));
  std::vector<double> singles;
  for (int i = 0; i < 101; ++i) singles.push_back(maximin_score(latin_hypercube(10, lo, hi, rng, 1)));
  std::nth_element(singles.begin(), singles.begin() + 50, singles.end());
  CHECK(best >= singles[50]);
  CHECK(maximin_score({Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4), Eigen::Vector2d(0, 1)}) == 1.0);
}

TEST_CASE("candidates lie within bounds and are deterministic") {
  const Problem p = bnh();
  OptimizationRun r(p, exponential_weight(), small_settings(0));
  execute(r);
  FitOptions fo;
  fo.starts = 2;
  const Surrogates models(p, r.history, fo);
  Rng a(5), b(5);
  const CandidateSet s1 = generate_candidates(models, r.pareto, p.lower, p.upper, 80, a);
  const CandidateSet s2 = generate_candidates(models, r.pareto, p.lower, p.upper, 80, b);
  REQUIRE(s1.size() == 80);
  REQUIRE(s1.points.size() == 80);
  for (std::size_t k = 0; k < s1.size(); ++k) {
    CHECK((s1.points[k].array() >= p.lower.array()).all());
    CHECK((s1.points[k].array() <= p.upper.array()).all());
    CHECK(s1.points[k] == s2.points[k]);
    CHECK(s1.predictive[k].means == s2.predictive[k].means);
    for (double sd : s1.predictive[k].sds) CHECK(sd >= 0.0);
    const double pf = models.prob_feasible(s1.points[k]);
    CHECK((pf >= 0.0 && pf <= 1.0));
  }
}

TEST_CASE("a budget equal to the initial design evaluates only the design") {
  OptimizationRun r(bnh(), exponential_weight(), small_settings(0));
  execute(r);
  CHECK(r.history.size() == 8);
  CHECK(r.diagnostics.empty());
  for (const auto& obs : r.history) {
    CHECK(obs.iteration == 0);
    CHECK(std::isnan(obs.selected_ewhi));
  }
}

TEST_CASE("the front holds feasible observations only") {
  std::vector<Observation> history(3);
  history[0].evaluation = {{1.0, 1.0}, {1.0}};
  history[1].evaluation = {{2.0, 0.5}, {-1.0}};
  history[2].evaluation = {{3.0, 3.0}, {0.0}};
  const ParetoState s = feasible_front(history, 2);
  REQUIRE(s.front().size() == 1);
  CHECK(s.front()[0] == ObjectiveVector{2.0, 0.5});
  CHECK(s.all_observed().size() == 2);
}

TEST_CASE("a short BNH run") {
  std::vector<std::size_t> seen;
  RunObserver obs;
  std::size_t iterations = 0;
  obs.on_observation = [&](const Observation& o) { seen.push_back(o.iteration); };
  obs.on_iteration = [&](const IterationDiagnostics&) { ++iterations; };
  const OptimizationRun r = run(OptimizationRun(bnh(), exponential_weight(), small_settings(4)), obs);
  CHECK(r.history.size() == 12);
  CHECK(seen.size() == 12);
  CHECK(iterations == 4);
  REQUIRE(r.diagnostics.size() == 4);
  for (std::size_t i = 8; i < 12; ++i) {
    const Observation& o = r.history[i];
    CHECK(o.iteration == i - 7);
    CHECK((o.x.array() >= 0.0).all());
    CHECK(o.x(0) <= 5.0);
    CHECK(o.x(1) <= 3.0);
    CHECK(o.selected_ewhi >= 0.0);
    CHECK(o.z_estimate > 0.0);
  }
  for (const auto& d : r.diagnostics) {
    CHECK(d.smc_stages >= 1);
    CHECK(d.selected_index < 60);
  }
  const ParetoState f = feasible_front(r.history, 2);
  CHECK(f.front() == r.pareto.front());

  // fixed seed, same run
  const OptimizationRun again = run(OptimizationRun(bnh(), exponential_weight(), small_settings(4)));
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(again.history[i].x == r.history[i].x);
    const bool same = again.history[i].selected_ewhi == r.history[i].selected_ewhi ||
                      (std::isnan(again.history[i].selected_ewhi) && std::isnan(r.history[i].selected_ewhi));
    CHECK(same);
  }
}

TEST_CASE("a front covering the weight box stops the run with context") {
  Problem p = toy_sphere_pair();
  p.evaluate = [](const Eigen::VectorXd& x) { return Evaluation{{-1.0 - x(0), -1.0 - x(0)}, {}}; };
  OptimizationRun r(p, exponential_weight(), small_settings(3));
  try {
    execute(r);
    FAIL("expected SmcInitError");
  } catch (const SmcInitError& e) {
    CHECK(std::string(e.what()).find("iteration 1") != std::string::npos);
  }
  CHECK(r.history.size() == 8);
}

TEST_CASE("a failing evaluation keeps the history so far") {
  Problem p = bnh();
  auto calls = std::make_shared<int>(0);
  const auto inner = p.evaluate;
  p.evaluate = [calls, inner](const Eigen::VectorXd& x) {
    if (++*calls > 9) throw std::runtime_error("simulator crashed");
    return inner(x);
  };
  OptimizationRun r(p, exponential_weight(), small_settings(4));
  CHECK_THROWS_AS(execute(r), EvaluationError);
  CHECK(r.history.size() == 9);
}

TEST_CASE("run settings are validated") {
  OptimizerSettings s = small_settings(1);
  s.n_init = 1;
  CHECK_THROWS(OptimizationRun(bnh(), exponential_weight(), s));
  s = small_settings(1);
  s.m_y = 0;
  CHECK_THROWS(OptimizationRun(bnh(), exponential_weight(), s));
  CHECK_THROWS_AS(OptimizationRun(bnh(), uniform_box_weight(BoundingBox({0, 0, 0}, {1, 1, 1})), s), DimensionError);
}
