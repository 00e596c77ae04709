#pragma once

#include <cstddef>

#include "ewhi/gp.hpp"
#include "ewhi/pareto.hpp"
#include "ewhi/weights.hpp"

namespace ewhi {

/// Midpoint-rule quadrature of omega(y) P(xi(x) dominates y) over box minus the
/// dominated region, nodes x nodes cells. Two objectives.
double ewhi_grid_oracle(const PredictiveDistribution& pred, const ParetoState& pareto, const WeightFunction& w,
                        const BoundingBox& box, std::size_t nodes);

/// Exact expected hypervolume improvement over {y <= ref_point} minus the
/// dominated region, by a strip decomposition of the non-dominated region and
/// closed-form Gaussian partial moments. Two objectives, sds > 0.
double exact_ehvi_2d(const PredictiveDistribution& pred, const ParetoState& pareto, const ObjectiveVector& ref_point);

/// Same integral restricted to a finite box.
double exact_ehvi_2d(const PredictiveDistribution& pred, const ParetoState& pareto, const BoundingBox& box);

}  // namespace ewhi
