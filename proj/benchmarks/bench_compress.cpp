#include <benchmark/benchmark.h>

#include "qhmm/qhmm.hpp"

using namespace qhmm;

static void BM_CompressExample(benchmark::State& state) {
  const auto model = example_model_family(0.5, 0.5, ExampleBranch::quantum_reduction);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compress(model, PhaseAssignment::zero(), {}, 6));
  }
}
BENCHMARK(BM_CompressExample);

static void BM_SweepFiftyBetas(benchmark::State& state) {
  std::vector<double> betas;
  for (int k = 1; k <= 50; ++k) betas.push_back(k / 51.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_reduction_curves(0.5, betas));
  }
}
BENCHMARK(BM_SweepFiftyBetas)->Unit(benchmark::kMillisecond);
