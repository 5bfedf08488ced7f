#pragma once

#include <array>
#include <cstdint>

#include "driftstream/learner.hpp"

namespace driftstream {

/// Welford accumulator for running mean and population variance.
struct RunningMoments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  double variance() const {
    return count > 0 ? m2 / static_cast<double>(count) : 0.0;
  }
};

/// Incremental Gaussian Naive Bayes for binary labels. Per-class,
/// per-feature Gaussians; variances are smoothed by
/// eps = 1e-9 + 1e-6 * (range of the feature over all samples seen).
class GaussianNaiveBayes final : public Learner {
 public:
  Prediction predict(const FeatureVector& vec) const override;
  void learn(const FeatureVector& vec, Label truth) override;

  std::uint64_t samples_learned() const override { return total_count_; }
  std::string name() const override { return "nb"; }

  /// Log posterior (unnormalized) of each class for a sample; used by the
  /// batch-recompute oracle. Untrained classes get -inf.
  std::array<double, 2> log_posteriors(const FeatureVector& vec) const;

  double variance_smoothing(std::size_t feature) const;

  std::array<std::uint64_t, 2> class_counts() const { return class_count_; }
  const RunningMoments& moments(std::size_t cls, std::size_t feature) const {
    return stats_[cls][feature];
  }

 private:
  std::array<std::uint64_t, 2> class_count_{};
  std::uint64_t total_count_ = 0;
  std::array<std::array<RunningMoments, kFeatureCount>, 2> stats_{};
  std::array<double, kFeatureCount> feature_min_{};
  std::array<double, kFeatureCount> feature_max_{};

  friend class ModelSerializer;
};

}  // namespace driftstream
