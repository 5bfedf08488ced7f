#pragma once

#include <cstdint>
#include <deque>
#include <vector>

namespace driftstream {

/// Statistical cut threshold between two sub-windows of sizes n0 and n1,
/// given the variance of the whole window:
///   m = 1 / (1/n0 + 1/n1)
///   eps = sqrt((2/m) * var * ln(2/delta')) + (2/(3m)) * ln(2/delta')
double cut_threshold(std::uint64_t n0, std::uint64_t n1,
                     double window_variance, double delta_prime);

/// ADWIN change detector over a bounded [0,1] signal. The window is kept
/// as an exponential histogram: row i holds buckets summarizing 2^i
/// samples each; a row compresses by merging its two oldest buckets when
/// it exceeds the per-row capacity. Split tests compare the means of
/// every prefix/suffix pair at bucket boundaries.
class AdwinDetector {
 public:
  static constexpr int kMaxBucketsPerRow = 5;
  static constexpr std::uint64_t kCheckInterval = 32;

  explicit AdwinDetector(double delta = 0.002);

  /// Appends a value; returns true when the detector dropped an older
  /// portion of the window (drift). Throws OutOfRange for values outside
  /// [0,1]. Split tests run when width % 32 == 0; use check_drift() to
  /// force one.
  bool update(double value);

  /// Runs the split tests immediately.
  bool check_drift();

  double mean() const;
  double variance() const;  // population variance of the retained window
  std::uint64_t width() const { return width_; }
  double delta() const { return delta_; }
  std::uint64_t detections() const { return detections_; }
  std::size_t bucket_count() const;

 private:
  struct Bucket {
    double sum = 0.0;
    double var = 0.0;  // sum of squared deviations inside the bucket
  };

  double delta_;
  // rows_[i] holds buckets of 2^i samples, ordered oldest -> newest.
  std::vector<std::deque<Bucket>> rows_;
  std::uint64_t width_ = 0;
  double total_sum_ = 0.0;
  double total_var_ = 0.0;  // sum of squared deviations over the window
  std::uint64_t detections_ = 0;

  void insert_bucket(double value);
  void compress();
  void drop_oldest_bucket();

  friend class AdwinSerializer;
};

}  // namespace driftstream
