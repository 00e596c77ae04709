#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "ewhi/estimator.hpp"
#include "ewhi/gp.hpp"
#include "ewhi/smc.hpp"
#include "ewhi/weights.hpp"

using namespace ewhi;

namespace {

ParetoState bnh_like_front() {
  ParetoState s(2);
  for (double t = 0.05; t < 1.0; t += 0.1) {
    s = update_front(s, ObjectiveVector{130.0 * t * t, 50.0 * (1.0 - t) * (1.0 - t) + 4.0});
  }
  return s;
}

CandidateSet random_candidates(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> m1(0, 140), m2(0, 55), sd(1, 12);
  CandidateSet set;
  for (std::size_t k = 0; k < n; ++k) set.predictive.push_back({{m1(rng), m2(rng)}, {sd(rng), sd(rng)}});
  set.points.resize(n);
  return set;
}

}  // namespace

static void BM_OptimalDensity(benchmark::State& state) {
  const CandidateSet set = random_candidates(static_cast<std::size_t>(state.range(0)), 1);
  const L2OptimalDensity gamma = l2opt_density(set, exponential_weight(), bnh_like_front());
  const ObjectiveVector y{20.0, 25.0};
  for (auto _ : state) benchmark::DoNotOptimize(gamma(y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OptimalDensity)->RangeMultiplier(10)->Range(10, 1000)->Complexity();

static void BM_RunSmc(benchmark::State& state) {
  const ParetoState front = bnh_like_front();
  const WeightFunction w = exponential_weight();
  const CandidateSet set = random_candidates(100, 2);
  const L2OptimalDensity gamma = l2opt_density(set, w, front);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(run_smc(init_particles(front, w.support_box(), m, rng), gamma, rng).z_estimate);
  }
}
BENCHMARK(BM_RunSmc)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_EstimateBatch(benchmark::State& state) {
  const ParetoState front = bnh_like_front();
  const WeightFunction w = exponential_weight();
  const CandidateSet set = random_candidates(static_cast<std::size_t>(state.range(0)), 4);
  const L2OptimalDensity gamma = l2opt_density(set, w, front);
  Rng rng(5);
  const ParticleSystem system = run_smc(init_particles(front, w.support_box(), 1000, rng), gamma, rng);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_batch(set, system, gamma));
}
BENCHMARK(BM_EstimateBatch)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_GpFit(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = u(rng);
    X(i, 1) = u(rng);
    y(i) = std::sin(4 * X(i, 0)) + X(i, 1) * X(i, 1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit(X, y).mean_constant());
}
BENCHMARK(BM_GpFit)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_GpPredict(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::MatrixXd X(30, 2);
  Eigen::VectorXd y(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    X(i, 0) = u(rng);
    X(i, 1) = u(rng);
    y(i) = std::sin(4 * X(i, 0)) + X(i, 1) * X(i, 1);
  }
  const GpModel m = fit(X, y);
  const Eigen::Vector2d x(0.3, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(m.predict(x).sd);
}
BENCHMARK(BM_GpPredict);
BENCHMARK_MAIN();
