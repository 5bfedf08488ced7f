#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace driftstream {

/// Deterministic 64-bit generator (splitmix64). Used everywhere a seeded
/// stream is required so results do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t bounded(std::uint64_t bound) {
    // Rejection sampling over the largest multiple of bound.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Poisson sample by Knuth's product-of-uniforms method. Adequate for the
  /// small lambdas used in online bagging.
  std::uint32_t poisson(double lambda) {
    const double limit = std::exp(-lambda);
    double product = uniform();
    std::uint32_t k = 0;
    while (product > limit) {
      ++k;
      product *= uniform();
    }
    return k;
  }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

 private:
  std::uint64_t state_;
};

/// Fisher-Yates shuffle with an explicit generator so the permutation is
/// identical across standard libraries.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

/// Deterministic seed derivation: mixes a root seed with a stream index so
/// repetitions and ensemble members get independent substreams.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  Rng mixer(root ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  return mixer.next();
}

}  // namespace driftstream
