#include "ewhi/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ewhi/errors.hpp"
#include "ewhi/normal.hpp"

namespace ewhi {

namespace {

void require_2d(std::size_t p) {
  if (p != 2) throw UnsupportedDimensionError("reference oracles are implemented for two objectives only");
}

// Integral of Phi((t - mean)/sd) over [a, b].
double partial_moment_interval(double a, double b, double mean, double sd) {
  if (!(b > a)) return 0.0;
  return gaussian_partial_moment(b, mean, sd) - gaussian_partial_moment(a, mean, sd);
}

}  // namespace

double ewhi_grid_oracle(const PredictiveDistribution& pred, const ParetoState& pareto, const WeightFunction& w,
                        const BoundingBox& box, std::size_t nodes) {
  require_2d(pareto.dimension());
  require_2d(box.dimension());
  if (nodes == 0) throw std::invalid_argument("grid needs at least one node per axis");
  const double h1 = (box.upper[0] - box.lower[0]) / static_cast<double>(nodes);
  const double h2 = (box.upper[1] - box.lower[1]) / static_cast<double>(nodes);
  double total = 0.0;
  std::vector<double> y(2);
  for (std::size_t i = 0; i < nodes; ++i) {
    y[0] = box.lower[0] + (static_cast<double>(i) + 0.5) * h1;
    double column = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
      y[1] = box.lower[1] + (static_cast<double>(j) + 0.5) * h2;
      if (pareto.in_dominated_region(y)) continue;
      const double omega = w(y);
      if (omega == 0.0) continue;
      column += omega * prob_dominates(pred, y);
    }
    total += column;
  }
  return total * h1 * h2;
}

double exact_ehvi_2d(const PredictiveDistribution& pred, const ParetoState& pareto, const BoundingBox& box) {
  require_2d(pareto.dimension());
  require_2d(pred.dimension());
  for (double s : pred.sds) {
    if (!(s > 0.0)) throw std::invalid_argument("exact EHVI requires positive predictive sds (use the grid oracle)");
  }
  const double l1 = box.lower[0], u1 = box.upper[0];
  const double l2 = box.lower[1], u2 = box.upper[1];
  // Phi((y1-m1)/s1) Phi((y2-m2)/s2) factorizes over each axis-aligned cell.
  const auto cell = [&](double a1, double b1, double a2, double b2) {
    return partial_moment_interval(a1, b1, pred.means[0], pred.sds[0]) *
           partial_moment_interval(a2, std::min(b2, u2), pred.means[1], pred.sds[1]);
  };

  const auto& front = pareto.front();
  double total = 0.0;
  double x = l1;
  double level = u2;
  std::size_t k = 0;
  for (; k < front.size() && front[k][0] <= l1; ++k) level = std::min(level, front[k][1]);
  for (; k < front.size() && front[k][0] < u1; ++k) {
    total += cell(x, front[k][0], l2, level);
    x = front[k][0];
    level = std::min(level, front[k][1]);
  }
  total += cell(x, u1, l2, level);
  return total;
}

double exact_ehvi_2d(const PredictiveDistribution& pred, const ParetoState& pareto, const ObjectiveVector& ref_point) {
  require_2d(ref_point.size());
  require_2d(pareto.dimension());
  require_2d(pred.dimension());
  constexpr double inf = std::numeric_limits<double>::infinity();
  // BoundingBox insists on finite entries, so build the cells directly.
  for (double s : pred.sds) {
    if (!(s > 0.0)) throw std::invalid_argument("exact EHVI requires positive predictive sds (use the grid oracle)");
  }
  const double u1 = ref_point[0], u2 = ref_point[1];
  const auto cell = [&](double a1, double b1, double b2) {
    return partial_moment_interval(a1, b1, pred.means[0], pred.sds[0]) *
           partial_moment_interval(-inf, std::min(b2, u2), pred.means[1], pred.sds[1]);
  };
  const auto& front = pareto.front();
  double total = 0.0;
  double x = -inf;
  double level = u2;
  for (std::size_t k = 0; k < front.size() && front[k][0] < u1; ++k) {
    total += cell(x, front[k][0], level);
    x = front[k][0];
    level = std::min(level, front[k][1]);
  }
  total += cell(x, u1, level);
  return total;
}

}  // namespace ewhi
