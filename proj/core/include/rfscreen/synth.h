#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rfscreen/dataset.h"

namespace rfscreen {

enum class BlendingMode { kLinear, kLogarithmic };

std::string to_string(BlendingMode mode);
BlendingMode parse_blending_mode(const std::string& text);

// Synthetic multiclass feature space: hidden "true" features carry class
// structure, hidden "fake" features are pure noise, and every output feature
// is a random weighted blend of a few hidden features.
struct GeneratorConfig {
  std::size_t n_classes = 20;
  std::size_t n_samples_per_class = 16;
  std::size_t n_true_features = 10;
  std::size_t n_fake_features = 90;
  double min_usefulness = 0.5;
  double max_usefulness = 1.0;
  // Number of distinct class locations per hidden true feature; classes share
  // them. 0 (or >= n_classes) gives every class its own location.
  std::size_t location_sharing_extent = 0;
  // Accepted for parameter-name compatibility; it does not affect generation.
  std::size_t location_ordering_extent = 0;
  std::size_t n_features_out = 400;
  std::size_t min_count = 2;
  std::size_t max_count = 4;
  BlendingMode blending_mode = BlendingMode::kLogarithmic;
  std::uint64_t seed = 137;

  void validate() const;
};

struct BlendSource {
  std::size_t hidden = 0;  // 0-based; ids below n_true_features are true features
  double weight = 0.0;
};

struct Provenance {
  std::size_t n_true_features = 0;
  std::vector<double> usefulness;           // per hidden feature; 0 for fakes
  std::vector<std::vector<BlendSource>> outputs;  // per output feature

  bool is_true_hidden(std::size_t hidden) const { return hidden < n_true_features; }
  bool has_true_source(std::size_t output) const;
};

struct GeneratedData {
  Dataset dataset;
  Provenance provenance;
};

// Class c has per-feature mean drawn from N(0, u^2) and within-class noise
// N(0, (1 - u/2)^2) for a hidden true feature of usefulness u. Blends are
// s = sum w_j h_j with |w_j| ~ U[0.5, 1.5] and random sign; the logarithmic
// mode emits sign(s) * log(1 + |s|).
GeneratedData generate(const GeneratorConfig& config);

// Fraction of `selection` whose blends include at least one true hidden feature.
double truth_overlap(const FeatureSubset& selection, const Provenance& provenance);

}  // namespace rfscreen
