#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ewhi/errors.hpp"
#include "ewhi/estimator.hpp"
#include "ewhi/oracles.hpp"
#include "ewhi/smc.hpp"
#include "ewhi/weights.hpp"

using namespace ewhi;

namespace {

ParetoState front_of(std::initializer_list<ObjectiveVector> pts) {
  ParetoState s(2);
  for (const auto& y : pts) s = update_front(s, y);
  return s;
}

CandidateSet candidates(std::vector<PredictiveDistribution> preds) {
  CandidateSet set;
  set.predictive = std::move(preds);
  set.points.assign(set.predictive.size(), Eigen::VectorXd());
  return set;
}

std::vector<EwhiEstimate> sample_and_estimate(const CandidateSet& set, const WeightFunction& w,
                                              const ParetoState& front, std::size_t m_y, std::uint64_t seed) {
  const L2OptimalDensity gamma = l2opt_density(set, w, front);
  Rng rng(seed);
  const ParticleSystem s = run_smc(init_particles(front, w.support_box(), m_y, rng), gamma, rng);
  return estimate_batch(set, s, gamma);
}

}  // namespace

TEST_CASE("integrand examples") {
  const WeightFunction w = exponential_weight();
  const ObjectiveVector y{15, 30};
  CHECK(ewhi_integrand({{10, 20}, {5, 5}}, ObjectiveVector{200, 30}, w) == 0.0);
  CHECK(ewhi_integrand({{10, 20}, {0, 0}}, y, w) == w(y.values()));
  CHECK(ewhi_integrand({{20, 20}, {0, 0}}, y, w) == 0.0);
  CHECK(ewhi_integrand({{15, 30}, {4, 7}}, y, w) == doctest::Approx(0.25 * w(y.values())).epsilon(1e-15));
}

TEST_CASE("optimal density examples") {
  const WeightFunction w = exponential_weight();
  const ParetoState front = front_of({{20, 35}, {60, 12}});
  const PredictiveDistribution a{{15, 30}, {8, 4}}, b{{40, 15}, {10, 5}};

  SUBCASE("one candidate is its own integrand") {
    const L2OptimalDensity g = l2opt_density(candidates({a}), w, front);
    for (const ObjectiveVector y : {ObjectiveVector{5, 10}, ObjectiveVector{100, 2}, ObjectiveVector{0, 59}}) {
      CHECK(g(y) == doctest::Approx(ewhi_integrand(a, y, w)).epsilon(1e-14));
    }
  }
  SUBCASE("identical candidates scale by the root of their count") {
    const L2OptimalDensity g1 = l2opt_density(candidates({a}), w, front);
    const L2OptimalDensity g4 = l2opt_density(candidates({a, a, a, a}), w, front);
    const ObjectiveVector y{10, 20};
    CHECK(g4(y) == doctest::Approx(2.0 * g1(y)).epsilon(1e-14));
  }
  SUBCASE("two candidates at random points") {
    const L2OptimalDensity g = l2opt_density(candidates({a, b}), w, front);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> y1(0, 150), y2(0, 60);
    std::vector<double> buf(2);
    for (int i = 0; i < 100; ++i) {
      const ObjectiveVector y{y1(rng), y2(rng)};
      const double pa = ewhi_integrand(a, y, w), pb = ewhi_integrand(b, y, w);
      const double expected = front.in_dominated_region(y) ? 0.0 : std::sqrt(pa * pa + pb * pb);
      CHECK(g(y) == doctest::Approx(expected).epsilon(1e-13));
      CHECK(g.integrands(y, buf) == g(y));
      if (expected > 0.0) {
        CHECK(buf[0] == pa);
        CHECK(buf[1] == pb);
      }
    }
  }
  SUBCASE("zero on the dominated region") {
    const L2OptimalDensity g = l2opt_density(candidates({a, b}), w, front);
    CHECK(g(ObjectiveVector{30, 40}) == 0.0);
    CHECK(g(ObjectiveVector{60, 12.5}) == 0.0);
  }
  SUBCASE("validation") {
    CHECK_THROWS(l2opt_density(CandidateSet{}, w, front));
    CHECK_THROWS_AS(l2opt_density(candidates({{{1, 2, 3}, {1, 1, 1}}}), w, front), DimensionError);
    CHECK_THROWS(l2opt_density(candidates({{{1, 2}, {-1, 1}}}), w, front));
  }
}

TEST_CASE("single candidate: alpha is one and lambda is zero") {
  const WeightFunction w = exponential_weight();
  const ParetoState front = front_of({{20, 35}, {60, 12}});
  const CandidateSet set = candidates({{{25, 20}, {9, 6}}});
  const L2OptimalDensity gamma = l2opt_density(set, w, front);
  Rng rng(3);
  const ParticleSystem s = run_smc(init_particles(front, w.support_box(), 800, rng), gamma, rng);
  const auto est = estimate_batch(set, s, gamma);
  REQUIRE(est.size() == 1);
  CHECK(est[0].alpha_hat == 1.0);
  CHECK(est[0].lambda_sq == 0.0);
  CHECK(est[0].value == s.z_estimate);
  CHECK(est[0].variance == doctest::Approx(s.z_estimate * s.z_estimate * s.delta_sq_cum).epsilon(1e-14));
}

TEST_CASE("a density that vanishes at a particle is rejected") {
  const WeightFunction w = exponential_weight();
  const ParetoState front(2);
  const CandidateSet set = candidates({{{100, 50}, {0, 0}}});
  const L2OptimalDensity gamma = l2opt_density(set, w, front);
  Rng rng(1);
  const ParticleSystem s = init_particles(front, w.support_box(), 200, rng);
  CHECK_THROWS_AS(estimate_batch(set, s, gamma), InconsistentSampleError);
}

TEST_CASE("estimates agree with grid quadrature near a two-point front") {
  const WeightFunction w = exponential_weight();
  const ParetoState front = front_of({{20, 35}, {60, 12}});
  std::vector<PredictiveDistribution> preds;
  for (int k = 0; k < 10; ++k) {
    const double t = k / 9.0;
    preds.push_back({{10.0 + 50.0 * t, 34.0 - 22.0 * t}, {6.0 + 4.0 * t, 5.0 - 2.0 * t}});
  }
  const CandidateSet set = candidates(preds);
  const auto est = sample_and_estimate(set, w, front, 2000, 21);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double grid = ewhi_grid_oracle(set.predictive[k], front, w, w.support_box(), 400);
    CAPTURE(k);
    CHECK(est[k].value == doctest::Approx(grid).epsilon(0.05));
    CHECK(est[k].value >= 0.0);
    CHECK(est[k].variance >= 0.0);
  }
}

TEST_CASE("plain Monte Carlo through the general overload") {
  const WeightFunction w = exponential_weight();
  const ParetoState front = front_of({{20, 35}, {60, 12}});
  const CandidateSet set = candidates({{{15, 30}, {8, 4}}, {{40, 15}, {10, 5}}});
  const BoundingBox& box = w.support_box();
  Rng rng(5);
  const ParticleSystem s = init_particles(front, box, 20000, rng);
  const TargetDensity flat = [&](const ObjectiveVector& y) {
    return box.contains(y.values()) && !front.in_dominated_region(y) ? 1.0 : 0.0;
  };
  const auto est = estimate_batch(set, s, flat, w);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double grid = ewhi_grid_oracle(set.predictive[k], front, w, box, 400);
    CHECK(std::abs(est[k].value - grid) <= 4.0 * std::sqrt(est[k].variance));
  }

  // the optimal density through either overload gives the same numbers
  const L2OptimalDensity gamma = l2opt_density(set, w, front);
  const auto a = estimate_batch(set, s, gamma);
  const auto b = estimate_batch(set, s, TargetDensity(gamma), w);
  for (std::size_t k = 0; k < set.size(); ++k) {
    CHECK(a[k].value == doctest::Approx(b[k].value).epsilon(1e-13));
    CHECK(a[k].lambda_sq == doctest::Approx(b[k].lambda_sq).epsilon(1e-10));
  }
}

TEST_CASE("scaling the weight scales every estimate") {
  const WeightFunction w = gaussian_mixture_weight();
  const ParetoState front = front_of({{30, 40}, {70, 25}, {100, 10}});
  const CandidateSet set = candidates({{{35, 35}, {10, 6}}, {{80, 20}, {8, 5}}, {{110, 5}, {12, 4}}});
  const auto base = sample_and_estimate(set, w, front, 600, 17);
  const auto scaled = sample_and_estimate(set, w.scaled(10.0), front, 600, 17);
  const std::vector<double> feas(3, 1.0);
  for (std::size_t k = 0; k < set.size(); ++k) {
    CHECK(scaled[k].value == doctest::Approx(10.0 * base[k].value).epsilon(1e-10));
    CHECK(scaled[k].alpha_hat == doctest::Approx(base[k].alpha_hat).epsilon(1e-10));
  }
  CHECK(select_next(base, feas).index == select_next(scaled, feas).index);
}

TEST_CASE("a candidate deep in the dominated region scores lower") {
  const WeightFunction w = exponential_weight();
  const ParetoState front = front_of({{20, 35}, {60, 12}});
  const CandidateSet set = candidates({{{10, 20}, {5, 5}}, {{60, 50}, {5, 5}}});
  const auto est = sample_and_estimate(set, w, front, 1000, 2);
  CHECK(est[0].value > est[1].value);
  CHECK(select_next(est, std::vector<double>{1.0, 1.0}).index == 0);
}

TEST_CASE("select_next") {
  const auto make = [](std::initializer_list<double> values) {
    std::vector<EwhiEstimate> out;
    for (double v : values) out.push_back({v, 1.0, 0.0, 0.0});
    return out;
  };
  const std::vector<double> ones{1.0, 1.0, 1.0};
  CHECK(select_next(make({1.0, 3.0, 2.0}), ones).index == 1);
  CHECK_FALSE(select_next(make({1.0, 3.0, 2.0}), ones).used_fallback);
  CHECK(select_next(make({1.0, 3.0, 2.0}), std::vector<double>{1.0, 0.1, 1.0}).index == 2);
  CHECK(select_next(make({2.0, 1.0, 2.0}), ones).index == 0);

  const Selection zero = select_next(make({0.0, 0.0, 0.0}), ones);
  CHECK(zero.used_fallback);
  CHECK(zero.index == 0);
  const Selection spread = select_next(make({0.0, 0.0, 0.0}), ones, std::vector<double>{0.1, 0.5, 0.2});
  CHECK(spread.used_fallback);
  CHECK(spread.index == 1);
  CHECK(select_next(make({5.0, 5.0}), std::vector<double>{0.0, 0.0}).used_fallback);

  CHECK_THROWS(select_next(std::vector<EwhiEstimate>{}, std::vector<double>{}));
  CHECK_THROWS_AS(select_next(make({1.0}), ones), DimensionError);
}
