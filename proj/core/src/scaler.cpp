#include "driftstream/scaler.hpp"

#include <algorithm>

namespace driftstream {

FeatureVector OnlineMinMaxScaler::transform(const FeatureVector& vec) {
  FeatureVector out = vec;
  if (count_ == 0) {
    out.features.fill(0.5);
    min_ = vec.features;
    max_ = vec.features;
    count_ = 1;
    return out;
  }

  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    double range = max_[i] - min_[i];
    if (range > 0.0) {
      out.features[i] =
          std::clamp((vec.features[i] - min_[i]) / range, 0.0, 1.0);
    } else {
      out.features[i] = 0.5;
    }
    min_[i] = std::min(min_[i], vec.features[i]);
    max_[i] = std::max(max_[i], vec.features[i]);
  }
  ++count_;
  return out;
}

}  // namespace driftstream
