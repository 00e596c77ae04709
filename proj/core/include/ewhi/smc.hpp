#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ewhi/gp.hpp"
#include "ewhi/pareto.hpp"

namespace ewhi {

/// Un-normalized density on objective space; must be finite and >= 0.
using TargetDensity = std::function<double(const ObjectiveVector&)>;

struct SmcSettings {
  /// Each tempering increment is chosen so the incremental weights keep an
  /// effective sample size of ess_fraction * m.
  double ess_fraction = 0.7;
  /// Systematic resampling when the weight ESS drops below this fraction of m.
  double resample_fraction = 0.5;
  int mh_steps = 5;
  /// Lower bound on a tempering increment; lets the sampler cross targets whose
  /// support is strictly smaller than the initial region.
  double min_temperature_step = 1e-4;
  int max_stages = 10000;
};

/// Weighted objective-space sample with the running normalizing-constant estimate.
///
/// Particles always target gamma_t(y) = 1{y in box, y not dominated} gamma(y)^beta_t.
struct ParticleSystem {
  std::vector<ObjectiveVector> particles;
  std::vector<double> weights;  // normalized; empty when equally weighted
  BoundingBox box;
  ParetoState pareto{2};
  int stage = 0;
  double temperature = 0.0;
  double z_estimate = 0.0;
  std::vector<double> cv_ledger;  // per-stage squared coefficient of variation of theta
  double delta_sq_cum = 0.0;      // squared coefficient of variation of z_estimate
  std::vector<double> temperatures;

  std::size_t size() const { return particles.size(); }
  bool equally_weighted() const { return weights.empty(); }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 / static_cast<double>(particles.size()) : weights[i]; }
};

/// m i.i.d. uniform particles on box minus the dominated region, by rejection.
/// z_estimate is the exact region volume for two objectives, otherwise a 1e5-draw
/// Monte Carlo estimate.
ParticleSystem init_particles(const ParetoState& state, const BoundingBox& box, std::size_t m, Rng& rng);

/// Adaptive tempering from the uniform initial density to target. Updates the
/// normalizing-constant estimate and its coefficient-of-variation ledger each stage.
ParticleSystem run_smc(ParticleSystem system, const TargetDensity& target, Rng& rng,
                       const SmcSettings& settings = {});

/// Systematic resampling. Returns m ancestor indices; weights need not be normalized.
std::vector<std::size_t> systematic_resample(const std::vector<double>& weights, std::size_t m, double u);

}  // namespace ewhi
