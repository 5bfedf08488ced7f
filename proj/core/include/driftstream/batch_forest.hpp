#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "driftstream/learner.hpp"
#include "driftstream/rng.hpp"

namespace driftstream {

struct BatchForestConfig {
  std::size_t tree_count = 100;
  bool bootstrap = true;
  std::size_t feature_subset = 5;  // per-node random subset; 0 = all
  std::size_t max_depth = 0;       // 0 = unlimited
  std::size_t min_leaf = 1;
  std::uint64_t seed = 1;
};

/// Bootstrap-trained CART forest (Gini impurity, numeric thresholds).
/// Trained once, then frozen: learn() always throws ModelFrozen.
class BatchForest final : public Learner {
 public:
  struct Node {
    int split_feature = -1;  // -1 => leaf
    double threshold = 0.0;
    std::unique_ptr<Node> left, right;
    std::uint64_t counts[2] = {0, 0};
  };

  Prediction predict(const FeatureVector& vec) const override;
  void learn(const FeatureVector& vec, Label truth) override;

  std::uint64_t samples_learned() const override { return trained_on_; }
  std::string name() const override { return "batch-rf"; }

  const BatchForestConfig& config() const { return config_; }
  std::size_t tree_count() const { return trees_.size(); }

  /// Trains the forest from labeled vectors (labels taken from each
  /// sample). Throws SingleClassTrainingSet unless both classes appear.
  friend BatchForest batch_train(std::span<const FeatureVector> samples,
                                 const BatchForestConfig& config);

 private:
  BatchForestConfig config_;
  std::vector<std::unique_ptr<Node>> trees_;
  std::uint64_t trained_on_ = 0;

  friend class ModelSerializer;
};

BatchForest batch_train(std::span<const FeatureVector> samples,
                        const BatchForestConfig& config = {});

}  // namespace driftstream
