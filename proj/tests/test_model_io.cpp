#include "driftstream/model_io.hpp"

#include <gtest/gtest.h>

#include "driftstream/adaptive_forest.hpp"
#include "driftstream/batch_forest.hpp"
#include "driftstream/error.hpp"
#include "driftstream/hoeffding_tree.hpp"
#include "driftstream/naive_bayes.hpp"
#include "stream_fixtures.hpp"

using namespace driftstream;
using driftstream::testing::label_flip_stream;
using driftstream::testing::separable_stream;

namespace {

// Snapshot, restore and require that the restored model is exact: same
// snapshot bytes, same predictions, and identical behavior when training
// continues.
void check_roundtrip(Learner& model, const std::vector<FeatureVector>& more) {
  std::string snapshot = save_model(model);
  auto restored = load_model(snapshot);
  EXPECT_EQ(save_model(*restored), snapshot);

  auto probes = separable_stream(50, 999);
  for (const auto& probe : probes) {
    Prediction a = model.predict(probe);
    Prediction b = restored->predict(probe);
    ASSERT_EQ(a.label, b.label);
    ASSERT_DOUBLE_EQ(a.score, b.score);
  }

  if (!more.empty()) {
    for (const auto& sample : more) {
      model.learn(sample, sample.label);
      restored->learn(sample, sample.label);
    }
    EXPECT_EQ(save_model(model), save_model(*restored));
  }
}

}  // namespace

TEST(ModelIo, NaiveBayesRoundTrip) {
  GaussianNaiveBayes nb;
  auto stream = separable_stream(500, 1);
  for (const auto& s : stream) nb.learn(s, s.label);
  check_roundtrip(nb, separable_stream(100, 2));
}

TEST(ModelIo, HoeffdingTreeRoundTrip) {
  HoeffdingTreeConfig config;
  config.seed = 17;
  HoeffdingTree tree(config);
  // Drifting stream so alternates and ADWIN state exist in the snapshot.
  auto stream = label_flip_stream(6000, 4000, 3);
  for (const auto& s : stream) tree.learn(s, s.label);
  check_roundtrip(tree, separable_stream(300, 4));
}

TEST(ModelIo, AdaptiveForestRoundTrip) {
  ArfConfig config;
  config.tree_count = 5;
  config.seed = 23;
  AdaptiveRandomForest forest(config);
  auto stream = label_flip_stream(3000, 2000, 5);
  for (const auto& s : stream) forest.learn(s, s.label);
  check_roundtrip(forest, separable_stream(200, 6));
}

TEST(ModelIo, BatchForestRoundTrip) {
  auto samples = separable_stream(600, 7);
  BatchForestConfig config;
  config.tree_count = 25;
  config.seed = 31;
  BatchForest forest = batch_train(samples, config);
  check_roundtrip(forest, {});  // frozen: no continued training

  auto restored = load_model(save_model(forest));
  EXPECT_THROW(restored->learn(samples[0], samples[0].label), ModelFrozen);
}

TEST(ModelIo, VersionTagChecked) {
  GaussianNaiveBayes nb;
  std::string snapshot = save_model(nb);
  std::string tampered = snapshot;
  auto pos = tampered.find("\"format_version\":1");
  ASSERT_NE(pos, std::string::npos);
  tampered.replace(pos, 18, "\"format_version\":9");
  EXPECT_THROW(load_model(tampered), Error);
}

TEST(ModelIo, UnknownTypeRejected) {
  EXPECT_THROW(load_model(R"({"format_version":1,"type":"svm","model":{}})"),
               Error);
}
