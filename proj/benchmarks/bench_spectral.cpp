#include <benchmark/benchmark.h>

#include "qhmm/qhmm.hpp"

using namespace qhmm;

static void BM_SpectrumExampleModel(benchmark::State& state) {
  const auto op = build_self_transfer(example_model_family(0.5, 0.5, ExampleBranch::quantum_reduction));
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectrum(op));
  }
}
BENCHMARK(BM_SpectrumExampleModel);

// Doubled-index operators are mostly null space.
static void BM_SpectrumEmbedded(benchmark::State& state) {
  const auto c = random_classical_hmm(static_cast<std::size_t>(state.range(0)), 2, 3, 0.2);
  const auto op = embed_classical_in_quantum(build_classical_transfer(c, c));
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectrum(op));
  }
}
BENCHMARK(BM_SpectrumEmbedded)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_CheckEquivalence(benchmark::State& state) {
  const auto a = random_qhmm(2, 2, 2, 1);
  const auto b = random_qhmm(3, 2, 1, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_equivalence(a, b));
  }
}
BENCHMARK(BM_CheckEquivalence)->Unit(benchmark::kMillisecond);
