#include <random>

#include <benchmark/benchmark.h>

#include "kldesign/fixtures.hpp"
#include "kldesign/outer.hpp"

namespace {

using namespace kld;

void BM_InnerSolveChebyshev(benchmark::State& state) {
  const ModelPair pair = fixtures::chebyshev_pair();
  const Design xi = fixtures::chebyshev_start();
  InnerConfig inner;
  inner.multistart_count = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(minimize_beta2(pair, xi, inner).value);
}
BENCHMARK(BM_InnerSolveChebyshev)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_InnerSolveLogistic(benchmark::State& state) {
  const ModelPair pair = fixtures::logistic_pair();
  const Design xi = fixtures::logistic_start();
  for (auto _ : state) benchmark::DoNotOptimize(minimize_beta2(pair, xi, InnerConfig{}).value);
}
BENCHMARK(BM_InnerSolveLogistic)->Unit(benchmark::kMillisecond);

Design random_design(std::mt19937_64& rng, const DesignSpace& space, int m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> pts;
  for (int i = 0; i < m; ++i) {
    Vector x(space.dim());
    for (int k = 0; k < space.dim(); ++k) x(k) = space.lower(k) + u(rng) * (space.upper(k) - space.lower(k));
    pts.push_back(x);
  }
  return Design::uniform(space, pts);
}

void BM_Wasserstein1d(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const DesignSpace s = DesignSpace::interval(-1, 1);
  const Design a = random_design(rng, s, static_cast<int>(state.range(0)));
  const Design b = random_design(rng, s, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_distance_1d(a, b));
}
BENCHMARK(BM_Wasserstein1d)->Arg(8)->Arg(64);

void BM_WassersteinLp(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const DesignSpace s{Vector::Constant(2, 0.0), Vector::Constant(2, 1.0)};
  const Design a = random_design(rng, s, static_cast<int>(state.range(0)));
  const Design b = random_design(rng, s, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_distance_lp(a, b));
}
BENCHMARK(BM_WassersteinLp)->Arg(8)->Arg(16);

void BM_OuterIteration(benchmark::State& state) {
  const ModelPair pair = fixtures::chebyshev_pair();
  AlgoConfig algo;
  algo.max_iterations = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_first_order(pair, fixtures::chebyshev_start(), algo, InnerConfig{}).final_value);
  }
}
BENCHMARK(BM_OuterIteration)->Unit(benchmark::kMillisecond);

void BM_SupportCandidate(benchmark::State& state) {
  const ModelPair pair = fixtures::chebyshev_pair();
  const Design xi = fixtures::chebyshev_start();
  const Vector beta = minimize_beta2(pair, xi, InnerConfig{}).beta2_hat;
  for (auto _ : state) benchmark::DoNotOptimize(best_support_candidate(pair, xi, beta, AlgoConfig{}).psi_max);
}
BENCHMARK(BM_SupportCandidate);

}  // namespace

BENCHMARK_MAIN();
