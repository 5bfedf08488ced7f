#include "driftstream/batch_forest.hpp"

#include <gtest/gtest.h>

#include "driftstream/error.hpp"
#include "driftstream/model_io.hpp"
#include "stream_fixtures.hpp"

using namespace driftstream;
using driftstream::testing::separable_stream;

TEST(BatchForest, LearnsSeparableConcept) {
  auto samples = separable_stream(2000, 51);
  BatchForestConfig config;
  config.seed = 4;
  BatchForest forest = batch_train(samples, config);

  std::uint64_t correct = 0;
  for (const auto& s : samples)
    if (forest.predict(s).label == s.label) ++correct;
  EXPECT_GE(static_cast<double>(correct) / samples.size(), 0.99);
}

TEST(BatchForest, SingleUnbootstrappedTreeMemorizes) {
  auto samples = separable_stream(500, 66);
  BatchForestConfig config;
  config.tree_count = 1;
  config.bootstrap = false;
  config.feature_subset = 0;  // all features
  config.seed = 1;
  BatchForest forest = batch_train(samples, config);

  for (const auto& s : samples)
    ASSERT_EQ(forest.predict(s).label, s.label);
}

TEST(BatchForest, LearnAfterFreezeThrows) {
  auto samples = separable_stream(100, 5);
  BatchForest forest = batch_train(samples, {});
  EXPECT_THROW(forest.learn(samples[0], samples[0].label), ModelFrozen);
}

TEST(BatchForest, SingleClassTrainingRejected) {
  auto samples = separable_stream(100, 5);
  for (auto& s : samples) s.label = Label::benign;
  EXPECT_THROW(batch_train(samples, {}), SingleClassTrainingSet);
  EXPECT_THROW(batch_train(std::span<const FeatureVector>(samples.data(), 1), {}),
               SingleClassTrainingSet);
}

TEST(BatchForest, MajorityVoteBoundary) {
  // With an even forest split exactly in half, score 0.5 labels malicious.
  auto samples = separable_stream(400, 23);
  BatchForestConfig config;
  config.tree_count = 2;
  config.seed = 9;
  BatchForest forest = batch_train(samples, config);
  // Probe many points; whenever the two trees disagree the score must be
  // 0.5 and the boundary rule labels malicious.
  auto probes = separable_stream(500, 24);
  bool saw_tie = false;
  for (const auto& p : probes) {
    Prediction pred = forest.predict(p);
    if (pred.score == 0.5) {
      saw_tie = true;
      EXPECT_EQ(pred.label, Label::malicious);
    }
  }
  (void)saw_tie;  // ties depend on the draw; rule checked when they occur
}

TEST(BatchForest, DeterministicGivenSeed) {
  auto samples = separable_stream(800, 13);
  BatchForestConfig config;
  config.seed = 77;
  BatchForest a = batch_train(samples, config);
  BatchForest b = batch_train(samples, config);
  EXPECT_EQ(save_model(a), save_model(b));

  auto probes = separable_stream(100, 14);
  for (const auto& p : probes) {
    EXPECT_DOUBLE_EQ(a.predict(p).score, b.predict(p).score);
  }
}

TEST(BatchForest, RepeatedPredictionIdentical) {
  auto samples = separable_stream(300, 31);
  BatchForest forest = batch_train(samples, {});
  FeatureVector probe = samples[7];
  Prediction first = forest.predict(probe);
  Prediction second = forest.predict(probe);
  EXPECT_EQ(first.label, second.label);
  EXPECT_DOUBLE_EQ(first.score, second.score);
}
