#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rfscreen/dataset.h"
#include "rfscreen/forest.h"
#include "rfscreen/rng.h"

namespace rfscreen {

// Random forest-based multiround screening.
//
// The (canary-augmented) feature set is shuffled once and cut into chunks of
// `alpha` features. Round i trains a forest on chunk i together with the
// `beta` survivors of round i-1, ranks that pool by selection frequency and
// keeps the top `beta`. The survivors of the last round are the result.
struct ScreeningConfig {
  std::size_t alpha = 100;  // step-size: fresh features per round
  std::size_t beta = 20;    // reduced-size: survivors per round and final output size
  ForestParams forest;      // n_subfeatures is capped at each round's pool size
  std::size_t n_canaries = 0;
  std::uint64_t seed = kDefaultSeed;  // feature permutation and canary values

  // Throws ValidationError unless 1 <= beta <= alpha <= n_features and the
  // forest parameters are in range. n_features counts canaries.
  void validate(std::size_t n_features) const;
};

// Feature ids in round records are 0-based positions in the augmented
// dataset: originals first, then canaries.
struct RoundRecord {
  std::size_t round = 0;  // 1-based
  std::vector<std::size_t> chunk;
  std::vector<std::size_t> carried;
  std::vector<std::size_t> importance;  // aligned with chunk followed by carried
  std::vector<std::size_t> selected;    // descending importance

  std::size_t pool_size() const { return chunk.size() + carried.size(); }

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct CanaryAudit {
  std::size_t leak_count = 0;
  std::vector<std::size_t> leaked;  // 0-based augmented ids

  bool clean() const { return leak_count == 0; }
};

struct ScreeningResult {
  FeatureSubset selected;              // augmented ids, descending importance
  std::vector<std::string> feature_names;  // augmented dataset names
  std::size_t n_original_features = 0;
  std::vector<std::size_t> permutation;    // 0-based
  std::vector<RoundRecord> rounds;
  std::vector<std::size_t> canary_ids;     // 0-based augmented ids
  std::size_t canary_leak_count = 0;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;
};

// Fisher-Yates permutation of 0..n-1 driven by `seed`.
std::vector<std::size_t> permute_features(std::size_t n, std::uint64_t seed);

// Consecutive slices of `permutation`: ceil(n / alpha) chunks, all of width
// alpha except possibly the last.
std::vector<std::vector<std::size_t>> partition(std::span<const std::size_t> permutation,
                                                std::size_t alpha);

// n_canaries i.i.d. standard normal columns (column-major) for `n_samples`
// rows, drawn from the canary stream of `seed`.
std::vector<double> canary_values(std::size_t n_samples, std::size_t n_canaries, std::uint64_t seed);

// Orders pool positions by descending importance, ties by smaller feature id,
// and returns the first `keep` feature ids.
std::vector<std::size_t> rank_pool(std::span<const std::size_t> pool_ids,
                                   std::span<const std::size_t> importance, std::size_t keep);

ScreeningResult screen(const Dataset& dataset, const ScreeningConfig& config);

CanaryAudit canary_audit(const ScreeningResult& result);

}  // namespace rfscreen
