#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "driftstream/adwin.hpp"
#include "driftstream/hoeffding_tree.hpp"
#include "driftstream/learner.hpp"
#include "driftstream/rng.hpp"

namespace driftstream {

struct ArfConfig {
  std::size_t tree_count = 10;
  double lambda = 6.0;            // Poisson online bagging
  std::size_t feature_subset = 5; // ceil(sqrt(25))
  double warning_delta = 0.01;    // fires earlier than drift
  double drift_delta = 0.002;
  bool detectors_enabled = true;
  bool constant_bag_weight = false;  // k = 1 instead of Poisson draws
  double grace_period = 200.0;
  double split_confidence = 1e-7;
  double tie_threshold = 0.05;
  std::uint64_t seed = 1;
};

/// Online random forest: Poisson bagging over Hoeffding trees with
/// per-leaf random feature subsets; per-tree warning/drift ADWINs grow a
/// background tree on warning and swap it in on drift.
class AdaptiveRandomForest final : public Learner {
 public:
  explicit AdaptiveRandomForest(ArfConfig config = {});

  Prediction predict(const FeatureVector& vec) const override;
  void learn(const FeatureVector& vec, Label truth) override;

  std::uint64_t samples_learned() const override { return samples_learned_; }
  std::uint64_t drift_events() const override { return replacements_; }
  std::string name() const override { return "arf"; }

  const ArfConfig& config() const { return config_; }
  std::uint64_t warnings() const { return warnings_; }
  std::size_t background_tree_count() const;
  const HoeffdingTree& member(std::size_t i) const { return *members_[i].tree; }

 private:
  struct Member {
    std::unique_ptr<HoeffdingTree> tree;
    std::optional<AdwinDetector> warning;
    std::optional<AdwinDetector> drift;
    std::unique_ptr<HoeffdingTree> background;
    Rng rng;

    explicit Member(Rng member_rng) : rng(member_rng) {}
  };

  ArfConfig config_;
  Rng rng_;
  std::vector<Member> members_;
  std::uint64_t samples_learned_ = 0;
  std::uint64_t replacements_ = 0;
  std::uint64_t warnings_ = 0;

  std::unique_ptr<HoeffdingTree> make_tree();

  friend class ModelSerializer;
};

}  // namespace driftstream
