#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ewhi/errors.hpp"
#include "ewhi/oracles.hpp"
#include "ewhi/weights.hpp"

using namespace ewhi;

namespace {

ParetoState front_of(std::initializer_list<ObjectiveVector> pts) {
  ParetoState s(2);
  for (const auto& y : pts) s = update_front(s, y);
  return s;
}

}  // namespace

TEST_CASE("grid oracle: zero weight and indicator cases") {
  const BoundingBox unit({0, 0}, {1, 1});
  const ParetoState front = front_of({{0.5, 0.5}});
  const PredictiveDistribution below{{-1, -1}, {0, 0}};

  const WeightFunction zero = uniform_box_weight(BoundingBox({5, 5}, {6, 6}));
  CHECK(ewhi_grid_oracle({{0.2, 0.2}, {0.1, 0.1}}, front, zero, unit, 50) == 0.0);

  // degenerate prediction below the box: the integrand is the indicator of the non-dominated part
  const WeightFunction u = uniform_box_weight(unit);
  CHECK(ewhi_grid_oracle(below, front, u, unit, 100) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(ewhi_grid_oracle(below, ParetoState(2), u, unit, 100) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid oracle converges to the exact integral") {
  const BoundingBox box({0, 0}, {150, 60});
  const WeightFunction u = uniform_box_weight(box);
  const ParetoState front = front_of({{20, 35}, {60, 12}, {100, 4}});
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> m1(0, 120), m2(0, 50), s(2, 15);
  for (int i = 0; i < 10; ++i) {
    const PredictiveDistribution pred{{m1(rng), m2(rng)}, {s(rng), s(rng)}};
    const double exact = exact_ehvi_2d(pred, front, box);
    if (exact < 1.0) continue;
    CAPTURE(i);
    CHECK(ewhi_grid_oracle(pred, front, u, box, 800) == doctest::Approx(exact).epsilon(0.01));
  }
}

TEST_CASE("exact EHVI with near-degenerate predictions is the hypervolume improvement") {
  const PredictiveDistribution pred{{2, 3}, {1e-9, 1e-9}};
  CHECK(exact_ehvi_2d(pred, ParetoState(2), ObjectiveVector{10, 8}) == doctest::Approx(8.0 * 5.0).epsilon(1e-9));
  // front point (4, 1): the improvement is [2,4] x [3,8] plus [4,10] x [3,1]=empty
  CHECK(exact_ehvi_2d(pred, front_of({{4, 1}}), ObjectiveVector{10, 8}) ==
        doctest::Approx(2.0 * 5.0).epsilon(1e-9));
  // front point (1, 5): [2,10] x [3,5]
  CHECK(exact_ehvi_2d(pred, front_of({{1, 5}}), ObjectiveVector{10, 8}) ==
        doctest::Approx(8.0 * 2.0).epsilon(1e-9));
  // a dominated candidate improves nothing
  CHECK(exact_ehvi_2d(pred, front_of({{1, 1}}), ObjectiveVector{10, 8}) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("exact EHVI is symmetric under swapping the objectives") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 10), s(0.2, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ObjectiveVector> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({u(rng), u(rng)});
    ParetoState a(2), b(2);
    for (const auto& y : pts) {
      a = update_front(a, y);
      b = update_front(b, ObjectiveVector{y[1], y[0]});
    }
    const double m0 = u(rng), m1 = u(rng), s0 = s(rng), s1 = s(rng);
    const double lhs = exact_ehvi_2d({{m0, m1}, {s0, s1}}, a, ObjectiveVector{12, 11});
    const double rhs = exact_ehvi_2d({{m1, m0}, {s1, s0}}, b, ObjectiveVector{11, 12});
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("one-point front: exact EHVI vs fine grid") {
  const BoundingBox box({0, 0}, {10, 10});
  const ParetoState front = front_of({{4, 6}});
  const PredictiveDistribution pred{{3, 5}, {2, 1.5}};
  const double exact = exact_ehvi_2d(pred, front, box);
  CHECK(ewhi_grid_oracle(pred, front, uniform_box_weight(box), box, 800) == doctest::Approx(exact).epsilon(0.005));
}

TEST_CASE("grid oracle decreases as the front grows") {
  const WeightFunction w = exponential_weight();
  const BoundingBox& box = w.support_box();
  const PredictiveDistribution pred{{30, 25}, {10, 6}};
  ParetoState front(2);
  double previous = ewhi_grid_oracle(pred, front, w, box, 200);
  for (const ObjectiveVector y : {ObjectiveVector{50, 40}, ObjectiveVector{30, 45}, ObjectiveVector{70, 15},
                                  ObjectiveVector{25, 30}}) {
    front = update_front(front, y);
    const double v = ewhi_grid_oracle(pred, front, w, box, 200);
    CHECK(v <= previous);
    previous = v;
  }
  CHECK(ewhi_grid_oracle(pred, front, w, box, 200) == ewhi_grid_oracle(pred, front, w, box, 200));
}

TEST_CASE("oracle errors") {
  const BoundingBox box({0, 0}, {1, 1});
  CHECK_THROWS(exact_ehvi_2d({{0.5, 0.5}, {0.0, 1.0}}, ParetoState(2), box));
  CHECK_THROWS(exact_ehvi_2d({{0.5, 0.5}, {1.0, 0.0}}, ParetoState(2), ObjectiveVector{1, 1}));
  CHECK_THROWS_AS(exact_ehvi_2d({{0, 0, 0}, {1, 1, 1}}, ParetoState(3), ObjectiveVector{1, 1, 1}),
                  UnsupportedDimensionError);
  CHECK_THROWS_AS(ewhi_grid_oracle({{0, 0, 0}, {1, 1, 1}}, ParetoState(3), uniform_box_weight(box),
                                   BoundingBox({0, 0, 0}, {1, 1, 1}), 10),
                  UnsupportedDimensionError);
  CHECK_THROWS(ewhi_grid_oracle({{0, 0}, {1, 1}}, ParetoState(2), uniform_box_weight(box), box, 0));
}
