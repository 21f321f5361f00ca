#include <benchmark/benchmark.h>

#include "qhmm/qhmm.hpp"

using namespace qhmm;

static void BM_EnumerateDistribution(benchmark::State& state) {
  const auto model = random_qhmm(3, 2, 2, 11);
  const auto length = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_distribution(model, length));
  }
}
BENCHMARK(BM_EnumerateDistribution)->DenseRange(4, 12, 4);

static void BM_QuantumTransfer(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto model = random_qhmm(d, 2, 2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_self_transfer(model));
  }
}
BENCHMARK(BM_QuantumTransfer)->Arg(2)->Arg(3)->Arg(4);

static void BM_ClassicalTransfer(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto model = random_classical_hmm(m, 3, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_self_transfer(model));
  }
}
BENCHMARK(BM_ClassicalTransfer)->Arg(4)->Arg(8)->Arg(16);
