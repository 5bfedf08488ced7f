#include "driftstream/adwin.hpp"

#include <cmath>

#include "driftstream/error.hpp"

namespace driftstream {

double cut_threshold(std::uint64_t n0, std::uint64_t n1,
                     double window_variance, double delta_prime) {
  double m = 1.0 / (1.0 / static_cast<double>(n0) + 1.0 / static_cast<double>(n1));
  double log_term = std::log(2.0 / delta_prime);
  return std::sqrt((2.0 / m) * window_variance * log_term) +
         (2.0 / (3.0 * m)) * log_term;
}

AdwinDetector::AdwinDetector(double delta) : delta_(delta) {
  if (delta <= 0.0 || delta >= 1.0)
    throw OutOfRange("adwin delta must be in (0,1)");
}

bool AdwinDetector::update(double value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw OutOfRange("adwin input outside [0,1]");

  // Welford-style append to the window totals.
  if (width_ > 0) {
    double mean_old = total_sum_ / static_cast<double>(width_);
    double d = value - mean_old;
    double mean_new = (total_sum_ + value) / static_cast<double>(width_ + 1);
    total_var_ += d * (value - mean_new);
  }
  total_sum_ += value;
  ++width_;
  insert_bucket(value);
  compress();

  if (width_ % kCheckInterval == 0) return check_drift();
  return false;
}

void AdwinDetector::insert_bucket(double value) {
  if (rows_.empty()) rows_.emplace_back();
  rows_[0].push_back(Bucket{value, 0.0});
}

void AdwinDetector::compress() {
  for (std::size_t row = 0; row < rows_.size(); ++row) {
    if (rows_[row].size() <= static_cast<std::size_t>(kMaxBucketsPerRow))
      break;
    // Merge the two oldest buckets of this row into the next row.
    Bucket a = rows_[row].front();
    rows_[row].pop_front();
    Bucket b = rows_[row].front();
    rows_[row].pop_front();

    double n = std::pow(2.0, static_cast<double>(row));  // samples per bucket
    double ua = a.sum / n;
    double ub = b.sum / n;
    Bucket merged;
    merged.sum = a.sum + b.sum;
    merged.var = a.var + b.var + (n * n / (2.0 * n)) * (ua - ub) * (ua - ub);

    if (row + 1 >= rows_.size()) rows_.emplace_back();
    rows_[row + 1].push_back(merged);
  }
}

void AdwinDetector::drop_oldest_bucket() {
  std::size_t row = rows_.size();
  while (row > 0 && rows_[row - 1].empty()) --row;
  --row;  // highest non-empty row holds the oldest bucket

  Bucket oldest = rows_[row].front();
  double n0 = std::pow(2.0, static_cast<double>(row));
  rows_[row].pop_front();
  while (!rows_.empty() && rows_.back().empty()) rows_.pop_back();

  double n1 = static_cast<double>(width_) - n0;
  if (n1 <= 0.0) {
    width_ = 0;
    total_sum_ = 0.0;
    total_var_ = 0.0;
    return;
  }
  double u0 = oldest.sum / n0;
  double rest_sum = total_sum_ - oldest.sum;
  double u1 = rest_sum / n1;
  // Inverse of the pairwise-combination rule.
  total_var_ -= oldest.var + (n0 * n1 / (n0 + n1)) * (u0 - u1) * (u0 - u1);
  if (total_var_ < 0.0) total_var_ = 0.0;  // guard against rounding
  total_sum_ = rest_sum;
  width_ -= static_cast<std::uint64_t>(n0);
}

bool AdwinDetector::check_drift() {
  if (width_ < 2) return false;
  bool drift = false;

  bool reduced = true;
  while (reduced) {
    reduced = false;
    double variance = total_var_ / static_cast<double>(width_);
    double delta_prime = delta_ / std::log(static_cast<double>(width_));

    // Scan prefix/suffix splits from oldest to newest bucket boundary.
    std::uint64_t n0 = 0;
    double sum0 = 0.0;
    for (std::size_t r = rows_.size(); r-- > 0 && !reduced;) {
      double bucket_n = std::pow(2.0, static_cast<double>(r));
      for (const Bucket& b : rows_[r]) {
        n0 += static_cast<std::uint64_t>(bucket_n);
        sum0 += b.sum;
        std::uint64_t n1 = width_ - n0;
        if (n1 == 0) break;  // suffix empty: no split here
        double u0 = sum0 / static_cast<double>(n0);
        double u1 = (total_sum_ - sum0) / static_cast<double>(n1);
        double eps = cut_threshold(n0, n1, variance, delta_prime);
        if (std::fabs(u0 - u1) >= eps) {
          drop_oldest_bucket();
          drift = true;
          reduced = true;
          break;  // window changed: rescan
        }
      }
    }
    if (width_ < 2) break;
  }

  if (drift) ++detections_;
  return drift;
}

double AdwinDetector::mean() const {
  return width_ > 0 ? total_sum_ / static_cast<double>(width_) : 0.0;
}

double AdwinDetector::variance() const {
  return width_ > 0 ? total_var_ / static_cast<double>(width_) : 0.0;
}

std::size_t AdwinDetector::bucket_count() const {
  std::size_t count = 0;
  for (const auto& row : rows_) count += row.size();
  return count;
}

}  // namespace driftstream
