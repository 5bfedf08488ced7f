#include "driftstream/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace driftstream {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
}

void GaussianNaiveBayes::learn(const FeatureVector& vec, Label truth) {
  std::size_t cls = truth == Label::malicious ? 1 : 0;
  if (total_count_ == 0) {
    feature_min_ = vec.features;
    feature_max_ = vec.features;
  } else {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      feature_min_[f] = std::min(feature_min_[f], vec.features[f]);
      feature_max_[f] = std::max(feature_max_[f], vec.features[f]);
    }
  }
  ++class_count_[cls];
  ++total_count_;
  for (std::size_t f = 0; f < kFeatureCount; ++f)
    stats_[cls][f].add(vec.features[f]);
}

double GaussianNaiveBayes::variance_smoothing(std::size_t feature) const {
  double range =
      total_count_ > 0 ? feature_max_[feature] - feature_min_[feature] : 0.0;
  return 1e-9 + 1e-6 * range;
}

std::array<double, 2> GaussianNaiveBayes::log_posteriors(
    const FeatureVector& vec) const {
  std::array<double, 2> lp{-std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
  for (std::size_t cls = 0; cls < 2; ++cls) {
    if (class_count_[cls] == 0) continue;
    double acc = std::log(static_cast<double>(class_count_[cls]) /
                          static_cast<double>(total_count_));
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      double var = stats_[cls][f].variance() + variance_smoothing(f);
      double d = vec.features[f] - stats_[cls][f].mean;
      acc += -0.5 * (kLog2Pi + std::log(var)) - d * d / (2.0 * var);
    }
    lp[cls] = acc;
  }
  return lp;
}

Prediction GaussianNaiveBayes::predict(const FeatureVector& vec) const {
  if (total_count_ == 0) return kUntrainedPrediction;

  auto lp = log_posteriors(vec);
  if (class_count_[0] == 0) return {Label::malicious, 1.0};
  if (class_count_[1] == 0) return {Label::benign, 0.0};

  // Softmax-normalized malicious posterior via log-sum-exp.
  double hi = std::max(lp[0], lp[1]);
  double z = std::exp(lp[0] - hi) + std::exp(lp[1] - hi);
  double score = std::exp(lp[1] - hi) / z;
  return {score >= 0.5 ? Label::malicious : Label::benign, score};
}

}  // namespace driftstream
