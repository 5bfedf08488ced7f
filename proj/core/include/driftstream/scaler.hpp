#pragma once

#include <array>
#include <cstdint>

#include "driftstream/features.hpp"

namespace driftstream {

/// Online min-max scaler. A sample is mapped to [0,1] with the min/max of
/// samples seen *before* it, then the statistics absorb the sample; no
/// lookahead. The very first sample, and any feature with zero observed
/// range, maps to 0.5.
class OnlineMinMaxScaler {
 public:
  /// Applies the current scaling, then updates the running statistics.
  FeatureVector transform(const FeatureVector& vec);

  std::uint64_t samples_seen() const { return count_; }
  const std::array<double, kFeatureCount>& mins() const { return min_; }
  const std::array<double, kFeatureCount>& maxs() const { return max_; }

 private:
  std::uint64_t count_ = 0;
  std::array<double, kFeatureCount> min_{};
  std::array<double, kFeatureCount> max_{};
};

}  // namespace driftstream
