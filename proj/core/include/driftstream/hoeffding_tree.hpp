#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "driftstream/adwin.hpp"
#include "driftstream/learner.hpp"
#include "driftstream/naive_bayes.hpp"
#include "driftstream/rng.hpp"

namespace driftstream {

/// Hoeffding bound: eps = sqrt(R^2 * ln(1/delta) / (2n)).
double hoeffding_bound(double range, double delta, double n);

struct HoeffdingTreeConfig {
  double grace_period = 200.0;    // leaf weight between split attempts
  double split_confidence = 1e-7; // delta for the Hoeffding bound
  double tie_threshold = 0.05;    // tau
  int candidate_cuts = 10;        // thresholds probed per feature
  std::size_t feature_subset = 0; // candidate features per leaf; 0 = all
  bool adaptive = true;           // per-node ADWIN + alternate subtrees
  double adwin_delta = 0.002;
  std::uint64_t seed = 1;
};

/// Incremental decision tree splitting on the Hoeffding bound, with the
/// adaptive variant monitoring every node's 0/1 error with ADWIN and
/// growing alternate subtrees that replace the original once their error
/// is lower by a statistically significant margin.
class HoeffdingTree final : public Learner {
 public:
  struct Node {
    // Internal node when split_feature >= 0.
    int split_feature = -1;
    double threshold = 0.0;
    std::unique_ptr<Node> left, right;

    // Leaf statistics.
    std::array<double, 2> class_counts{};  // [benign, malicious]
    std::array<std::array<RunningMoments, 2>, kFeatureCount> observers{};
    std::array<double, kFeatureCount> feature_min{};
    std::array<double, kFeatureCount> feature_max{};
    bool range_seen = false;
    double weight_since_eval = 0.0;
    std::vector<int> candidate_features;

    // Adaptive state.
    std::unique_ptr<AdwinDetector> error_adwin;
    std::unique_ptr<Node> alternate;

    bool is_leaf() const { return split_feature < 0; }
    double total_weight() const { return class_counts[0] + class_counts[1]; }
  };

  explicit HoeffdingTree(HoeffdingTreeConfig config = {});

  Prediction predict(const FeatureVector& vec) const override;
  void learn(const FeatureVector& vec, Label truth) override;

  std::uint64_t samples_learned() const override { return samples_learned_; }
  std::uint64_t drift_events() const override { return promotions_; }
  std::string name() const override { return config_.adaptive ? "hat" : "ht"; }

  const HoeffdingTreeConfig& config() const { return config_; }
  const Node& root() const { return *root_; }
  std::uint64_t split_count() const { return splits_; }
  std::uint64_t node_count() const;

  /// Evidence recorded at each split decision.
  struct SplitRecord {
    double g1 = 0.0;       // best information gain
    double g2 = 0.0;       // runner-up gain (0 when none)
    double epsilon = 0.0;  // Hoeffding bound at decision time
    double leaf_weight = 0.0;
    int feature = -1;
  };
  const std::vector<SplitRecord>& split_log() const { return split_log_; }

  /// Leaf-level prediction rule: Laplace-smoothed malicious fraction,
  /// score >= 0.5 labels malicious; an empty leaf answers the untrained
  /// default.
  static Prediction leaf_prediction(const Node& node);

 private:
  HoeffdingTreeConfig config_;
  std::unique_ptr<Node> root_;
  Rng rng_;
  std::uint64_t samples_learned_ = 0;
  std::uint64_t splits_ = 0;
  std::uint64_t promotions_ = 0;
  std::vector<SplitRecord> split_log_;

  std::unique_ptr<Node> make_leaf();
  void learn_at(Node* node, const FeatureVector& vec, Label truth);
  void update_leaf(Node* leaf, const FeatureVector& vec, Label truth);
  void attempt_split(Node* leaf);
  static Prediction predict_subtree(const Node* node, const FeatureVector& vec);
  bool consider_promotion(Node* node);

  friend class ModelSerializer;
};

}  // namespace driftstream
