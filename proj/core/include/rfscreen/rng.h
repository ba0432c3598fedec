#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace rfscreen {

// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of the sub-stream `index` of domain `domain` under `seed`. Streams with
// different (domain, index) pairs are statistically independent, which lets
// parallel workers draw without coordinating.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t domain,
                                    std::uint64_t index) {
  return mix64(mix64(seed ^ mix64(domain)) + index);
}

namespace streams {
inline constexpr std::uint64_t kTree = 0x7472656531ULL;
inline constexpr std::uint64_t kPermutation = 0x7065726d31ULL;
inline constexpr std::uint64_t kCanary = 0x63616e6131ULL;
inline constexpr std::uint64_t kRound = 0x726f756e64ULL;
inline constexpr std::uint64_t kFold = 0x666f6c6431ULL;
inline constexpr std::uint64_t kSubset = 0x7375627331ULL;
inline constexpr std::uint64_t kHidden = 0x6869646431ULL;
inline constexpr std::uint64_t kBlend = 0x626c656e64ULL;
inline constexpr std::uint64_t kLocation = 0x6c6f636131ULL;
}  // namespace streams

// mt19937_64 with distribution code written out so the drawn sequence does not
// depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform real in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  // First `k` entries of `values` become a uniform sample without replacement
  // (partial Fisher-Yates). Requires k <= values.size().
  template <typename T>
  void partial_shuffle(std::vector<T>& values, std::size_t k) {
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(values[i], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rfscreen

namespace rfscreen {

// Default random seed used throughout the reference experiments.
inline constexpr std::uint64_t kDefaultSeed = 20'230'125;

}  // namespace rfscreen
