#include "driftstream/hoeffding_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace driftstream {

namespace {

// Minimum window on both sides before an alternate/original comparison.
constexpr std::uint64_t kMinComparisonWidth = 64;

double binary_entropy(double c0, double c1) {
  double total = c0 + c1;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : {c0, c1}) {
    if (c <= 0.0) continue;
    double p = c / total;
    h -= p * std::log2(p);
  }
  return h;
}

double normal_cdf(double x, double mean, double stddev) {
  if (stddev <= 0.0) return x >= mean ? 1.0 : 0.0;
  return 0.5 * std::erfc(-(x - mean) / (stddev * 1.4142135623730951));
}

}  // namespace

double hoeffding_bound(double range, double delta, double n) {
  return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

HoeffdingTree::HoeffdingTree(HoeffdingTreeConfig config)
    : config_(config), rng_(config.seed) {
  root_ = make_leaf();
}

std::unique_ptr<HoeffdingTree::Node> HoeffdingTree::make_leaf() {
  auto node = std::make_unique<Node>();
  if (config_.feature_subset > 0 && config_.feature_subset < kFeatureCount) {
    // Partial Fisher-Yates: each new leaf draws its own candidate subset.
    std::array<int, kFeatureCount> indices;
    std::iota(indices.begin(), indices.end(), 0);
    for (std::size_t i = 0; i < config_.feature_subset; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng_.bounded(kFeatureCount - i));
      std::swap(indices[i], indices[j]);
    }
    node->candidate_features.assign(indices.begin(),
                                    indices.begin() + config_.feature_subset);
    std::sort(node->candidate_features.begin(), node->candidate_features.end());
  } else {
    node->candidate_features.resize(kFeatureCount);
    std::iota(node->candidate_features.begin(), node->candidate_features.end(), 0);
  }
  if (config_.adaptive)
    node->error_adwin = std::make_unique<AdwinDetector>(config_.adwin_delta);
  return node;
}

Prediction HoeffdingTree::leaf_prediction(const Node& node) {
  double total = node.total_weight();
  if (total <= 0.0) return kUntrainedPrediction;
  double score = (node.class_counts[1] + 1.0) / (total + 2.0);
  return {score >= 0.5 ? Label::malicious : Label::benign, score};
}

Prediction HoeffdingTree::predict_subtree(const Node* node,
                                          const FeatureVector& vec) {
  while (!node->is_leaf()) {
    node = vec.features[static_cast<std::size_t>(node->split_feature)] <=
                   node->threshold
               ? node->left.get()
               : node->right.get();
  }
  return leaf_prediction(*node);
}

Prediction HoeffdingTree::predict(const FeatureVector& vec) const {
  if (samples_learned_ == 0) return kUntrainedPrediction;
  return predict_subtree(root_.get(), vec);
}

void HoeffdingTree::learn(const FeatureVector& vec, Label truth) {
  ++samples_learned_;
  learn_at(root_.get(), vec, truth);
}

void HoeffdingTree::learn_at(Node* node, const FeatureVector& vec, Label truth) {
  if (node->error_adwin) {
    Prediction p = predict_subtree(node, vec);
    double err = p.label != truth ? 1.0 : 0.0;
    double mean_before = node->error_adwin->mean();
    bool changed = node->error_adwin->update(err);
    // Only a worsening error estimate starts an alternate; cuts from the
    // subtree improving are expected while it learns.
    if (changed && node->error_adwin->mean() > mean_before && !node->alternate)
      node->alternate = make_leaf();
  }

  if (node->alternate) {
    learn_at(node->alternate.get(), vec, truth);
    // On promotion the alternate (which already absorbed this sample)
    // becomes the node; do not train it twice.
    if (consider_promotion(node)) return;
  }

  if (node->is_leaf()) {
    update_leaf(node, vec, truth);
    return;
  }
  Node* child = vec.features[static_cast<std::size_t>(node->split_feature)] <=
                        node->threshold
                    ? node->left.get()
                    : node->right.get();
  learn_at(child, vec, truth);
}

bool HoeffdingTree::consider_promotion(Node* node) {
  const AdwinDetector& alt = *node->alternate->error_adwin;
  const AdwinDetector& cur = *node->error_adwin;
  if (alt.width() < kMinComparisonWidth || cur.width() < kMinComparisonWidth)
    return false;

  double n_alt = static_cast<double>(alt.width());
  double n_cur = static_cast<double>(cur.width());
  double pooled_var =
      (alt.variance() * n_alt + cur.variance() * n_cur) / (n_alt + n_cur);
  double delta_prime = config_.adwin_delta / std::log(n_alt + n_cur);
  double eps = cut_threshold(alt.width(), cur.width(), pooled_var, delta_prime);

  if (alt.mean() + eps < cur.mean()) {
    auto promoted = std::move(node->alternate);
    *node = std::move(*promoted);
    ++promotions_;
    return true;
  }
  if (cur.mean() + eps < alt.mean()) {
    node->alternate.reset();  // alternate lost the race
  }
  return false;
}

void HoeffdingTree::update_leaf(Node* leaf, const FeatureVector& vec,
                                Label truth) {
  std::size_t cls = truth == Label::malicious ? 1 : 0;
  leaf->class_counts[cls] += 1.0;
  if (!leaf->range_seen) {
    leaf->feature_min = vec.features;
    leaf->feature_max = vec.features;
    leaf->range_seen = true;
  } else {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      leaf->feature_min[f] = std::min(leaf->feature_min[f], vec.features[f]);
      leaf->feature_max[f] = std::max(leaf->feature_max[f], vec.features[f]);
    }
  }
  for (std::size_t f = 0; f < kFeatureCount; ++f)
    leaf->observers[f][cls].add(vec.features[f]);

  leaf->weight_since_eval += 1.0;
  if (leaf->weight_since_eval >= config_.grace_period) {
    leaf->weight_since_eval = 0.0;
    attempt_split(leaf);
  }
}

void HoeffdingTree::attempt_split(Node* leaf) {
  // A pure leaf has zero gain everywhere; nothing to evaluate.
  if (leaf->class_counts[0] <= 0.0 || leaf->class_counts[1] <= 0.0) return;
  if (!leaf->range_seen) return;

  double total = leaf->total_weight();
  double parent_entropy =
      binary_entropy(leaf->class_counts[0], leaf->class_counts[1]);

  struct SplitCandidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    std::array<double, 2> left_counts{};
  };
  SplitCandidate best, second;

  for (int f : leaf->candidate_features) {
    auto fi = static_cast<std::size_t>(f);
    double lo = leaf->feature_min[fi];
    double hi = leaf->feature_max[fi];
    if (!(hi > lo)) continue;

    SplitCandidate feature_best;
    for (int j = 1; j <= config_.candidate_cuts; ++j) {
      double t = lo + (hi - lo) * static_cast<double>(j) /
                          static_cast<double>(config_.candidate_cuts + 1);
      std::array<double, 2> left{};
      for (std::size_t cls = 0; cls < 2; ++cls) {
        const RunningMoments& obs = leaf->observers[fi][cls];
        if (obs.count == 0) continue;
        left[cls] = leaf->class_counts[cls] *
                    normal_cdf(t, obs.mean, std::sqrt(obs.variance()));
      }
      double wl = left[0] + left[1];
      double wr = total - wl;
      if (wl < 1e-9 || wr < 1e-9) continue;
      double gain = parent_entropy -
                    (wl / total) * binary_entropy(left[0], left[1]) -
                    (wr / total) * binary_entropy(leaf->class_counts[0] - left[0],
                                                  leaf->class_counts[1] - left[1]);
      if (gain > feature_best.gain) {
        feature_best = {gain, f, t, left};
      }
    }
    if (feature_best.feature >= 0) {
      if (feature_best.gain > best.gain) {
        second = best;
        best = feature_best;
      } else if (feature_best.gain > second.gain) {
        second = feature_best;
      }
    }
  }

  if (best.feature < 0 || best.gain <= 0.0) return;
  double eps = hoeffding_bound(1.0, config_.split_confidence, total);
  if (!(best.gain - second.gain > eps || eps < config_.tie_threshold)) return;

  split_log_.push_back({best.gain, second.gain, eps, total, best.feature});

  // Children start from the Gaussian-estimated class distributions of the
  // winning cut so routing has a sensible prior before new samples arrive.
  auto left = make_leaf();
  auto right = make_leaf();
  for (std::size_t cls = 0; cls < 2; ++cls) {
    double l = std::clamp(best.left_counts[cls], 0.0, leaf->class_counts[cls]);
    left->class_counts[cls] = l;
    right->class_counts[cls] = leaf->class_counts[cls] - l;
  }

  leaf->split_feature = best.feature;
  leaf->threshold = best.threshold;
  leaf->left = std::move(left);
  leaf->right = std::move(right);
  leaf->observers = {};
  leaf->weight_since_eval = 0.0;
  ++splits_;
}

std::uint64_t HoeffdingTree::node_count() const {
  std::uint64_t count = 0;
  auto walk = [&count](auto&& self, const Node* node) -> void {
    if (!node) return;
    ++count;
    self(self, node->left.get());
    self(self, node->right.get());
    self(self, node->alternate.get());
  };
  walk(walk, root_.get());
  return count;
}

}  // namespace driftstream
