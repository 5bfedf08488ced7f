#include <benchmark/benchmark.h>

#include "driftstream/adaptive_forest.hpp"
#include "driftstream/batch_forest.hpp"
#include "driftstream/hoeffding_tree.hpp"
#include "driftstream/naive_bayes.hpp"
#include "driftstream/rng.hpp"

using namespace driftstream;

namespace {

FeatureVector random_sample(Rng& rng) {
  FeatureVector vec;
  for (auto& f : vec.features) f = rng.uniform();
  vec.label = vec.features[0] < 0.5 ? Label::benign : Label::malicious;
  vec.byte_count = 1000;
  return vec;
}

template <typename Model>
void test_then_train(Model& model, benchmark::State& state) {
  Rng rng(17);
  std::uint64_t bytes = 0;
  for (auto _ : state) {
    FeatureVector vec = random_sample(rng);
    benchmark::DoNotOptimize(model.predict(vec));
    model.learn(vec, vec.label);
    bytes += vec.byte_count;
  }
  state.SetItemsProcessed(state.iterations());
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}

}  // namespace

static void BM_NaiveBayes(benchmark::State& state) {
  GaussianNaiveBayes model;
  test_then_train(model, state);
}
BENCHMARK(BM_NaiveBayes);

static void BM_HoeffdingTree(benchmark::State& state) {
  HoeffdingTreeConfig config;
  config.adaptive = false;
  HoeffdingTree model(config);
  test_then_train(model, state);
}
BENCHMARK(BM_HoeffdingTree);

static void BM_HoeffdingAdaptiveTree(benchmark::State& state) {
  HoeffdingTree model;
  test_then_train(model, state);
}
BENCHMARK(BM_HoeffdingAdaptiveTree);

static void BM_AdaptiveRandomForest(benchmark::State& state) {
  ArfConfig config;
  config.tree_count = static_cast<std::size_t>(state.range(0));
  AdaptiveRandomForest model(config);
  test_then_train(model, state);
}
BENCHMARK(BM_AdaptiveRandomForest)->Arg(5)->Arg(10);

static void BM_BatchForestPredict(benchmark::State& state) {
  Rng rng(19);
  std::vector<FeatureVector> train;
  for (int i = 0; i < 4000; ++i) train.push_back(random_sample(rng));
  BatchForest model = batch_train(train, {});
  for (auto _ : state) {
    FeatureVector vec = random_sample(rng);
    benchmark::DoNotOptimize(model.predict(vec));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BatchForestPredict);
