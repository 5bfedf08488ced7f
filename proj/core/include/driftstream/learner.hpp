#pragma once

#include <cstdint>
#include <string>

#include "driftstream/features.hpp"

namespace driftstream {

struct Prediction {
  Label label = Label::benign;
  double score = 0.5;  // malicious probability / confidence in [0,1]
};

/// Uniform online contract shared by all models. predict() never mutates
/// the model; a never-trained model predicts (benign, 0.5).
class Learner {
 public:
  virtual ~Learner() = default;

  virtual Prediction predict(const FeatureVector& vec) const = 0;
  virtual void learn(const FeatureVector& vec, Label truth) = 0;

  virtual std::uint64_t samples_learned() const = 0;

  /// Cumulative count of drift reactions (tree replacements, subtree
  /// promotions). Zero for models without drift handling.
  virtual std::uint64_t drift_events() const { return 0; }

  virtual std::string name() const = 0;
};

inline constexpr Prediction kUntrainedPrediction{Label::benign, 0.5};

}  // namespace driftstream
