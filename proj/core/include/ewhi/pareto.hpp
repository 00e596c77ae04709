#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ewhi {

/// A point in objective space. Non-empty, all entries finite.
class ObjectiveVector {
 public:
  ObjectiveVector() = default;
  explicit ObjectiveVector(std::vector<double> values);
  ObjectiveVector(std::initializer_list<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;

 private:
  std::vector<double> values_;
};

/// Axis-aligned box [lower, upper] with lower < upper componentwise.
struct BoundingBox {
  ObjectiveVector lower;
  ObjectiveVector upper;

  BoundingBox() = default;
  BoundingBox(ObjectiveVector lo, ObjectiveVector hi);

  std::size_t dimension() const { return lower.size(); }
  bool contains(std::span<const double> y) const;
  double volume() const;
};

/// Strict Pareto domination: y <= z componentwise with at least one strict inequality.
bool dominates(std::span<const double> y, std::span<const double> z);
inline bool dominates(const ObjectiveVector& y, const ObjectiveVector& z) {
  return dominates(y.values(), z.values());
}

/// Observed objective vectors together with their non-dominated subset.
///
/// Values are immutable; update_front returns a new state. In two dimensions
/// the front is kept sorted by increasing first coordinate (hence strictly
/// decreasing second coordinate), which gives logarithmic membership tests.
class ParetoState {
 public:
  explicit ParetoState(std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  const std::vector<ObjectiveVector>& front() const { return front_; }
  const std::vector<ObjectiveVector>& all_observed() const { return all_observed_; }
  bool empty() const { return all_observed_.empty(); }

  /// True iff some observation strictly dominates y, i.e. y lies in the dominated region.
  bool in_dominated_region(std::span<const double> y) const;
  bool in_dominated_region(const ObjectiveVector& y) const { return in_dominated_region(y.values()); }

  ParetoState with(const ObjectiveVector& y) const;

 private:
  std::size_t dimension_;
  std::vector<ObjectiveVector> front_;
  std::vector<ObjectiveVector> all_observed_;
};

ParetoState update_front(const ParetoState& state, const ObjectiveVector& y);

inline bool in_dominated_region(const ParetoState& state, const ObjectiveVector& y) {
  return state.in_dominated_region(y);
}

/// Exact volume of box minus the dominated region. Two objectives only.
double box_complement_volume_2d(const ParetoState& state, const BoundingBox& box);

}  // namespace ewhi
