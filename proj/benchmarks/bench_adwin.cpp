#include <benchmark/benchmark.h>

#include "driftstream/adwin.hpp"
#include "driftstream/rng.hpp"

using namespace driftstream;

static void BM_AdwinStationary(benchmark::State& state) {
  AdwinDetector detector(0.002);
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detector.update(rng.uniform() < 0.2 ? 1.0 : 0.0));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AdwinStationary);

static void BM_AdwinPeriodicShift(benchmark::State& state) {
  AdwinDetector detector(0.002);
  Rng rng(2);
  std::int64_t i = 0;
  const std::int64_t period = state.range(0);
  for (auto _ : state) {
    double p = (i / period) % 2 == 0 ? 0.1 : 0.9;
    benchmark::DoNotOptimize(detector.update(rng.uniform() < p ? 1.0 : 0.0));
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AdwinPeriodicShift)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_CutThreshold(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(cut_threshold(512, 4096, 0.21, 0.0002));
  }
}
BENCHMARK(BM_CutThreshold);
