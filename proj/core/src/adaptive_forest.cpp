#include "driftstream/adaptive_forest.hpp"

namespace driftstream {

AdaptiveRandomForest::AdaptiveRandomForest(ArfConfig config)
    : config_(config), rng_(config.seed) {
  members_.reserve(config_.tree_count);
  for (std::size_t i = 0; i < config_.tree_count; ++i) {
    Member m(Rng(rng_.next()));
    m.tree = make_tree();
    if (config_.detectors_enabled) {
      m.warning.emplace(config_.warning_delta);
      m.drift.emplace(config_.drift_delta);
    }
    members_.push_back(std::move(m));
  }
}

std::unique_ptr<HoeffdingTree> AdaptiveRandomForest::make_tree() {
  HoeffdingTreeConfig tc;
  tc.grace_period = config_.grace_period;
  tc.split_confidence = config_.split_confidence;
  tc.tie_threshold = config_.tie_threshold;
  tc.feature_subset = config_.feature_subset;
  tc.adaptive = false;  // adaptation is handled per tree, not per node
  tc.seed = rng_.next();
  return std::make_unique<HoeffdingTree>(tc);
}

void AdaptiveRandomForest::learn(const FeatureVector& vec, Label truth) {
  ++samples_learned_;
  for (Member& m : members_) {
    Prediction before = m.tree->predict(vec);

    std::uint32_t k =
        config_.constant_bag_weight ? 1 : m.rng.poisson(config_.lambda);
    for (std::uint32_t i = 0; i < k; ++i) m.tree->learn(vec, truth);

    if (m.background) {
      std::uint32_t kb =
          config_.constant_bag_weight ? 1 : m.rng.poisson(config_.lambda);
      for (std::uint32_t i = 0; i < kb; ++i) m.background->learn(vec, truth);
    }

    if (!config_.detectors_enabled) continue;
    double err = before.label != truth ? 1.0 : 0.0;
    // A cut only signals trouble when the retained error estimate went
    // up; cuts caused by the tree improving are not drift.
    double warning_before = m.warning->mean();
    bool warn = m.warning->update(err) && m.warning->mean() > warning_before;
    double drift_before = m.drift->mean();
    bool drift = m.drift->update(err) && m.drift->mean() > drift_before;

    if (drift) {
      m.tree = m.background ? std::move(m.background) : make_tree();
      m.background.reset();
      m.warning.emplace(config_.warning_delta);
      m.drift.emplace(config_.drift_delta);
      ++replacements_;
    } else if (warn && !m.background) {
      m.background = make_tree();
      ++warnings_;
    }
  }
}

Prediction AdaptiveRandomForest::predict(const FeatureVector& vec) const {
  if (samples_learned_ == 0) return kUntrainedPrediction;

  double weighted = 0.0;
  double weight_sum = 0.0;
  double plain = 0.0;
  for (const Member& m : members_) {
    double score = m.tree->predict(vec).score;
    double w = config_.detectors_enabled ? 1.0 - m.drift->mean() : 1.0;
    weighted += w * score;
    weight_sum += w;
    plain += score;
  }
  double score = weight_sum > 0.0
                     ? weighted / weight_sum
                     : plain / static_cast<double>(members_.size());
  return {score >= 0.5 ? Label::malicious : Label::benign, score};
}

std::size_t AdaptiveRandomForest::background_tree_count() const {
  std::size_t n = 0;
  for (const Member& m : members_)
    if (m.background) ++n;
  return n;
}

}  // namespace driftstream
