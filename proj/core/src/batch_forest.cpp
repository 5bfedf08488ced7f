#include "driftstream/batch_forest.hpp"

#include <algorithm>
#include <numeric>

#include "driftstream/error.hpp"

namespace driftstream {

namespace {

using Node = BatchForest::Node;

double gini(double c0, double c1) {
  double total = c0 + c1;
  if (total <= 0.0) return 0.0;
  double p0 = c0 / total;
  double p1 = c1 / total;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct TreeBuilder {
  std::span<const FeatureVector> samples;
  const BatchForestConfig& config;
  Rng& rng;

  std::unique_ptr<Node> build(std::vector<std::uint32_t>& indices,
                              std::size_t depth) {
    auto node = std::make_unique<Node>();
    for (std::uint32_t i : indices)
      ++node->counts[samples[i].label == Label::malicious ? 1 : 0];

    bool pure = node->counts[0] == 0 || node->counts[1] == 0;
    bool depth_capped = config.max_depth > 0 && depth >= config.max_depth;
    if (pure || depth_capped || indices.size() < 2 * config.min_leaf)
      return node;

    auto [feature, threshold, gain] = best_split(indices, *node);
    if (feature < 0 || gain <= 0.0) return node;

    std::vector<std::uint32_t> left_idx, right_idx;
    for (std::uint32_t i : indices) {
      auto& dst = samples[i].features[static_cast<std::size_t>(feature)] <=
                          threshold
                      ? left_idx
                      : right_idx;
      dst.push_back(i);
    }
    if (left_idx.size() < config.min_leaf || right_idx.size() < config.min_leaf)
      return node;

    node->split_feature = feature;
    node->threshold = threshold;
    indices.clear();
    indices.shrink_to_fit();
    node->left = build(left_idx, depth + 1);
    node->right = build(right_idx, depth + 1);
    return node;
  }

  std::tuple<int, double, double> best_split(
      const std::vector<std::uint32_t>& indices, const Node& node) {
    double parent = gini(static_cast<double>(node.counts[0]),
                         static_cast<double>(node.counts[1]));
    double total = static_cast<double>(indices.size());

    std::array<int, kFeatureCount> features;
    std::iota(features.begin(), features.end(), 0);
    std::size_t n_candidates = kFeatureCount;
    if (config.feature_subset > 0 && config.feature_subset < kFeatureCount) {
      for (std::size_t i = 0; i < config.feature_subset; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.bounded(kFeatureCount - i));
        std::swap(features[i], features[j]);
      }
      n_candidates = config.feature_subset;
      std::sort(features.begin(), features.begin() + static_cast<long>(n_candidates));
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 0.0;

    std::vector<std::pair<double, std::uint8_t>> column(indices.size());
    for (std::size_t fi = 0; fi < n_candidates; ++fi) {
      int f = features[fi];
      for (std::size_t k = 0; k < indices.size(); ++k) {
        const FeatureVector& s = samples[indices[k]];
        column[k] = {s.features[static_cast<std::size_t>(f)],
                     s.label == Label::malicious ? std::uint8_t{1} : std::uint8_t{0}};
      }
      std::sort(column.begin(), column.end());

      double left0 = 0.0, left1 = 0.0;
      double all0 = static_cast<double>(node.counts[0]);
      double all1 = static_cast<double>(node.counts[1]);
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        if (column[k].second == 1) left1 += 1.0; else left0 += 1.0;
        if (column[k].first == column[k + 1].first) continue;  // no cut here
        double wl = left0 + left1;
        double wr = total - wl;
        double gain = parent - (wl / total) * gini(left0, left1) -
                      (wr / total) * gini(all0 - left0, all1 - left1);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = (column[k].first + column[k + 1].first) / 2.0;
        }
      }
    }
    return {best_feature, best_threshold, best_gain};
  }
};

}  // namespace

BatchForest batch_train(std::span<const FeatureVector> samples,
                        const BatchForestConfig& config) {
  if (samples.size() < 2)
    throw SingleClassTrainingSet("need at least 2 training samples");
  bool has_benign = false, has_malicious = false;
  for (const auto& s : samples) {
    (s.label == Label::malicious ? has_malicious : has_benign) = true;
  }
  if (!has_benign || !has_malicious)
    throw SingleClassTrainingSet("training set contains a single class");

  BatchForest forest;
  forest.config_ = config;
  forest.trained_on_ = samples.size();
  Rng rng(config.seed);

  for (std::size_t t = 0; t < config.tree_count; ++t) {
    std::vector<std::uint32_t> indices(samples.size());
    if (config.bootstrap) {
      for (auto& idx : indices)
        idx = static_cast<std::uint32_t>(rng.bounded(samples.size()));
    } else {
      std::iota(indices.begin(), indices.end(), 0u);
    }
    TreeBuilder builder{samples, config, rng};
    forest.trees_.push_back(builder.build(indices, 0));
  }
  return forest;
}

void BatchForest::learn(const FeatureVector&, Label) {
  throw ModelFrozen("batch forest is frozen after training");
}

Prediction BatchForest::predict(const FeatureVector& vec) const {
  if (trees_.empty()) return kUntrainedPrediction;

  std::size_t malicious_votes = 0;
  for (const auto& tree : trees_) {
    const Node* node = tree.get();
    while (node->split_feature >= 0) {
      node = vec.features[static_cast<std::size_t>(node->split_feature)] <=
                     node->threshold
                 ? node->left.get()
                 : node->right.get();
    }
    if (node->counts[1] >= node->counts[0]) ++malicious_votes;
  }
  double score =
      static_cast<double>(malicious_votes) / static_cast<double>(trees_.size());
  return {score >= 0.5 ? Label::malicious : Label::benign, score};
}

}  // namespace driftstream
