#include "ewhi/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ewhi/errors.hpp"

namespace ewhi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

ObjectiveVector uniform_in_box(const BoundingBox& box, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> y(box.dimension());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * unif(rng);
  return ObjectiveVector(std::move(y));
}

double log_density(const TargetDensity& target, const ObjectiveVector& y) {
  const double v = target(y);
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument("target density must be finite and non-negative");
  }
  return v > 0.0 ? std::log(v) : kNegInf;
}

// Incremental weights exp(step * (L_i - L_max)); zero where the target vanishes.
void incremental_weights(const std::vector<double>& log_target, double log_max, double step,
                         std::vector<double>& out) {
  out.resize(log_target.size());
  for (std::size_t i = 0; i < log_target.size(); ++i) {
    out[i] = std::isinf(log_target[i]) ? 0.0 : std::exp(step * (log_target[i] - log_max));
  }
}

double effective_sample_size(const std::vector<double>& w) {
  double s = 0.0, s2 = 0.0;
  for (double v : w) {
    s += v;
    s2 += v * v;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

}  // namespace

ParticleSystem init_particles(const ParetoState& state, const BoundingBox& box, std::size_t m, Rng& rng) {
  if (state.dimension() != box.dimension()) throw DimensionError("front and box dimensions differ");
  if (m == 0) throw std::invalid_argument("particle count must be positive");

  ParticleSystem system;
  system.box = box;
  system.pareto = state;

  if (box.dimension() == 2) {
    system.z_estimate = box_complement_volume_2d(state, box);
  } else {
    constexpr int kDraws = 100000;
    int inside = 0;
    for (int i = 0; i < kDraws; ++i) {
      if (!state.in_dominated_region(uniform_in_box(box, rng))) ++inside;
    }
    system.z_estimate = box.volume() * static_cast<double>(inside) / kDraws;
  }
  if (!(system.z_estimate > 0.0)) {
    throw SmcInitError("the dominated region covers the whole sampling box");
  }

  constexpr std::size_t kCheckAfter = 1000000;
  std::size_t proposals = 0;
  system.particles.reserve(m);
  while (system.particles.size() < m) {
    ObjectiveVector y = uniform_in_box(box, rng);
    ++proposals;
    if (!state.in_dominated_region(y)) system.particles.push_back(std::move(y));
    if (proposals >= kCheckAfter && static_cast<double>(system.particles.size()) < 1e-4 * proposals) {
      throw SmcInitError("rejection sampler acceptance rate below 1e-4: the front fills the box");
    }
  }
  return system;
}

std::vector<std::size_t> systematic_resample(const std::vector<double>& weights, std::size_t m, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw DegenerateTargetError("cannot resample: all weights are zero");
  std::vector<std::size_t> idx(m);
  const double step = total / static_cast<double>(m);
  double threshold = u * step;
  double cumulative = weights.empty() ? 0.0 : weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < m; ++i) {
    while (cumulative < threshold && j + 1 < weights.size()) cumulative += weights[++j];
    idx[i] = j;
    threshold += step;
  }
  return idx;
}

ParticleSystem run_smc(ParticleSystem system, const TargetDensity& target, Rng& rng, const SmcSettings& settings) {
  const std::size_t m = system.particles.size();
  if (m == 0) throw std::invalid_argument("particle system is empty");
  const std::size_t p = system.box.dimension();
  const double md = static_cast<double>(m);
  const double target_ess = settings.ess_fraction * md;

  std::vector<double> log_target(m);
  for (std::size_t i = 0; i < m; ++i) log_target[i] = log_density(target, system.particles[i]);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w;

  // Conditional ESS of incremental weights w given the current normalized weights.
  const auto conditional_ess = [&](const std::vector<double>& inc) {
    if (system.equally_weighted()) return effective_sample_size(inc);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      s += system.weights[i] * inc[i];
      s2 += system.weights[i] * inc[i] * inc[i];
    }
    return s2 > 0.0 ? md * s * s / s2 : 0.0;
  };

  while (system.temperature < 1.0 && system.stage < settings.max_stages) {
    const double beta = system.temperature;
    double log_max = kNegInf;
    for (std::size_t i = 0; i < m; ++i) {
      if (system.equally_weighted() || system.weights[i] > 0.0) log_max = std::max(log_max, log_target[i]);
    }
    if (std::isinf(log_max)) throw DegenerateTargetError("target density vanishes at every particle");

    const auto ess_at = [&](double next) {
      incremental_weights(log_target, log_max, next - beta, w);
      return conditional_ess(w);
    };
    double next = 1.0;
    if (ess_at(1.0) < target_ess) {
      double lo = beta, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ess_at(mid) >= target_ess ? lo : hi) = mid;
      }
      next = std::min(1.0, std::max(lo, beta + settings.min_temperature_step));
    }

    const double step = next - beta;
    incremental_weights(log_target, log_max, step, w);
    double ratio = 0.0, delta_sq = 0.0;
    if (system.equally_weighted()) {
      double sum = 0.0, sum_sq = 0.0;
      for (double v : w) {
        sum += v;
        sum_sq += v * v;
      }
      if (!(sum > 0.0)) throw DegenerateTargetError("all incremental weights are zero");
      ratio = sum / md;
      delta_sq = sum_sq / (sum * sum) - 1.0 / md;
      system.weights.resize(m);
      for (std::size_t i = 0; i < m; ++i) system.weights[i] = w[i] / sum;
    } else {
      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) sum += system.weights[i] * w[i];
      if (!(sum > 0.0)) throw DegenerateTargetError("all incremental weights are zero");
      ratio = sum;
      double var = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double d = system.weights[i] * (w[i] - ratio);
        var += d * d;
      }
      delta_sq = var / (ratio * ratio);
      for (std::size_t i = 0; i < m; ++i) system.weights[i] = system.weights[i] * w[i] / sum;
    }
    const double theta = std::exp(step * log_max) * ratio;
    if (!(theta > 0.0) || !std::isfinite(theta)) throw DegenerateTargetError("stage ratio estimate is not positive");
    system.z_estimate *= theta;
    system.delta_sq_cum = delta_sq + (1.0 + delta_sq) * system.delta_sq_cum;
    system.cv_ledger.push_back(delta_sq);
    system.temperatures.push_back(next);

    if (effective_sample_size(system.weights) < settings.resample_fraction * md) {
      const auto ancestors = systematic_resample(system.weights, m, unif(rng));
      std::vector<ObjectiveVector> resampled;
      std::vector<double> resampled_log(m);
      resampled.reserve(m);
      for (std::size_t i = 0; i < m; ++i) {
        resampled.push_back(system.particles[ancestors[i]]);
        resampled_log[i] = log_target[ancestors[i]];
      }
      system.particles = std::move(resampled);
      log_target = std::move(resampled_log);
      system.weights.clear();
    }

    // Move: random-walk Metropolis-Hastings on gamma_t, proposal scale 2.38/sqrt(p) x particle sd.
    std::vector<double> scale(p);
    for (std::size_t k = 0; k < p; ++k) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < m; ++i) mean += system.weight(i) * system.particles[i][k];
      for (std::size_t i = 0; i < m; ++i) {
        const double d = system.particles[i][k] - mean;
        sq += system.weight(i) * d * d;
      }
      double sd = std::sqrt(sq);
      if (!(sd > 0.0)) sd = 1e-3 * (system.box.upper[k] - system.box.lower[k]);
      scale[k] = 2.38 / std::sqrt(static_cast<double>(p)) * sd;
    }
    std::vector<double> proposal(p);
    for (int s = 0; s < settings.mh_steps; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        const auto& current = system.particles[i];
        for (std::size_t k = 0; k < p; ++k) proposal[k] = current[k] + scale[k] * normal(rng);
        const double log_u = std::log(unif(rng));
        if (!system.box.contains(proposal) || system.pareto.in_dominated_region(proposal)) continue;
        ObjectiveVector candidate(proposal);
        const double l_new = log_density(target, candidate);
        if (std::isinf(l_new)) continue;
        if (log_u < next * (l_new - log_target[i])) {
          system.particles[i] = std::move(candidate);
          log_target[i] = l_new;
        }
      }
    }

    system.temperature = next;
    ++system.stage;
  }
  return system;
}

}  // namespace ewhi
