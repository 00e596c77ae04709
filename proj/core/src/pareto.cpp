#include "ewhi/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ewhi/errors.hpp"

namespace ewhi {

namespace {

void check_same_dimension(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

bool lexicographic_less(const ObjectiveVector& a, const ObjectiveVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

ObjectiveVector::ObjectiveVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw DimensionError("objective vector must have at least one component");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("objective vector entries must be finite");
    }
  }
}

ObjectiveVector::ObjectiveVector(std::initializer_list<double> values)
    : ObjectiveVector(std::vector<double>(values)) {}

BoundingBox::BoundingBox(ObjectiveVector lo, ObjectiveVector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  check_same_dimension(lower.size(), upper.size());
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw std::invalid_argument("bounding box requires lower < upper componentwise");
    }
  }
}

bool BoundingBox::contains(std::span<const double> y) const {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < lower[i] || y[i] > upper[i]) return false;
  }
  return true;
}

double BoundingBox::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
  return v;
}

bool dominates(std::span<const double> y, std::span<const double> z) {
  check_same_dimension(y.size(), z.size());
  bool strict = false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > z[i]) return false;
    if (y[i] < z[i]) strict = true;
  }
  return strict;
}

ParetoState::ParetoState(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw DimensionError("objective space dimension must be >= 1");
}

bool ParetoState::in_dominated_region(std::span<const double> y) const {
  check_same_dimension(y.size(), dimension_);
  if (front_.empty()) return false;
  if (dimension_ == 2) {
    // Last front point with f1 <= y1 has the smallest f2 among those candidates.
    auto it = std::upper_bound(front_.begin(), front_.end(), y[0],
                               [](double v, const ObjectiveVector& f) { return v < f[0]; });
    if (it == front_.begin()) return false;
    const ObjectiveVector& f = *std::prev(it);
    return f[1] <= y[1] && (f[0] < y[0] || f[1] < y[1]);
  }
  return std::any_of(front_.begin(), front_.end(), [&](const ObjectiveVector& f) { return dominates(f.values(), y); });
}

ParetoState ParetoState::with(const ObjectiveVector& y) const {
  check_same_dimension(y.size(), dimension_);
  ParetoState next = *this;
  next.all_observed_.push_back(y);

  const bool covered = std::any_of(front_.begin(), front_.end(), [&](const ObjectiveVector& f) {
    return f == y || dominates(f.values(), y.values());
  });
  if (covered) return next;

  std::erase_if(next.front_, [&](const ObjectiveVector& f) { return dominates(y.values(), f.values()); });
  auto pos = std::lower_bound(next.front_.begin(), next.front_.end(), y, lexicographic_less);
  next.front_.insert(pos, y);
  return next;
}

ParetoState update_front(const ParetoState& state, const ObjectiveVector& y) { return state.with(y); }

double box_complement_volume_2d(const ParetoState& state, const BoundingBox& box) {
  if (state.dimension() != 2 || box.dimension() != 2) {
    throw UnsupportedDimensionError("exact complement volume is only implemented for two objectives");
  }
  const double l1 = box.lower[0], u1 = box.upper[0];
  const double l2 = box.lower[1], u2 = box.upper[1];

  // Sweep strips in y1; inside a strip the non-dominated part is y2 below the
  // f2 of the last front point with f1 <= y1.
  const auto& front = state.front();
  const auto height = [&](double level) { return std::clamp(level, l2, u2) - l2; };
  double volume = 0.0;
  double x = l1;
  double level = u2;
  std::size_t k = 0;
  for (; k < front.size() && front[k][0] <= l1; ++k) level = std::min(level, front[k][1]);
  for (; k < front.size() && front[k][0] < u1; ++k) {
    volume += (front[k][0] - x) * height(level);
    x = front[k][0];
    level = std::min(level, front[k][1]);
  }
  volume += (u1 - x) * height(level);
  return volume;
}

}  // namespace ewhi
