#include "rfscreen/synth.h"

#include <cmath>
#include <numeric>

#include "rfscreen/error.h"
#include "rfscreen/rng.h"

namespace rfscreen {

std::string to_string(BlendingMode mode) {
  return mode == BlendingMode::kLinear ? "linear" : "logarithmic";
}

BlendingMode parse_blending_mode(const std::string& text) {
  if (text == "linear") return BlendingMode::kLinear;
  if (text == "logarithmic") return BlendingMode::kLogarithmic;
  throw ValidationError("blending-mode must be 'linear' or 'logarithmic', got '" + text + "'");
}

void GeneratorConfig::validate() const {
  if (n_classes < 1) throw ValidationError("n-classes must be >= 1");
  if (n_samples_per_class < 1) throw ValidationError("n-samples-per-class must be >= 1");
  if (n_true_features + n_fake_features == 0) {
    throw ValidationError("n-true-features + n-fake-features must be positive");
  }
  if (!(min_usefulness > 0.0 && min_usefulness <= 1.0) ||
      !(max_usefulness > 0.0 && max_usefulness <= 1.0)) {
    throw ValidationError("usefulness bounds must lie in (0, 1]");
  }
  if (min_usefulness > max_usefulness) throw ValidationError("min-usefulness exceeds max-usefulness");
  if (n_features_out < 1) throw ValidationError("n-features-out must be >= 1");
  if (min_count < 1) throw ValidationError("min-count must be >= 1");
  if (min_count > max_count) throw ValidationError("min-count exceeds max-count");
  if (max_count > n_true_features + n_fake_features) {
    throw ValidationError("max-count exceeds the number of hidden features");
  }
}

bool Provenance::has_true_source(std::size_t output) const {
  for (const auto& src : outputs.at(output)) {
    if (is_true_hidden(src.hidden)) return true;
  }
  return false;
}

GeneratedData generate(const GeneratorConfig& config) {
  config.validate();
  const std::size_t n = config.n_classes * config.n_samples_per_class;
  const std::size_t n_hidden = config.n_true_features + config.n_fake_features;

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i / config.n_samples_per_class) + 1;

  Provenance provenance;
  provenance.n_true_features = config.n_true_features;
  provenance.usefulness.assign(n_hidden, 0.0);

  const std::size_t pool =
      (config.location_sharing_extent == 0 || config.location_sharing_extent >= config.n_classes)
          ? config.n_classes
          : config.location_sharing_extent;

  // Hidden features, row index = sample.
  std::vector<double> hidden(n_hidden * n);
  for (std::size_t h = 0; h < n_hidden; ++h) {
    Rng rng(stream_seed(config.seed, streams::kHidden, h));
    double* out = hidden.data() + h * n;
    if (h < config.n_true_features) {
      const double u = rng.uniform(config.min_usefulness, config.max_usefulness);
      provenance.usefulness[h] = u;
      std::vector<double> locations(pool);
      for (auto& loc : locations) loc = rng.normal(0.0, u);
      std::vector<std::size_t> slot(config.n_classes);
      std::iota(slot.begin(), slot.end(), 0);
      rng.shuffle(slot);
      const double within = 1.0 - u / 2.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(labels[i] - 1);
        out[i] = locations[slot[c] % pool] + rng.normal(0.0, within);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = rng.normal();
    }
  }

  std::vector<double> values(config.n_features_out * n);
  std::vector<std::string> names(config.n_features_out);
  provenance.outputs.resize(config.n_features_out);
  std::vector<std::size_t> ids(n_hidden);
  for (std::size_t j = 0; j < config.n_features_out; ++j) {
    Rng rng(stream_seed(config.seed, streams::kBlend, j));
    const auto count = static_cast<std::size_t>(
        rng.between(static_cast<std::int64_t>(config.min_count), static_cast<std::int64_t>(config.max_count)));
    std::iota(ids.begin(), ids.end(), 0);
    rng.partial_shuffle(ids, count);
    auto& sources = provenance.outputs[j];
    for (std::size_t s = 0; s < count; ++s) {
      const double magnitude = rng.uniform(0.5, 1.5);
      const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
      sources.push_back({ids[s], sign * magnitude});
    }
    double* out = values.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (const auto& src : sources) s += src.weight * hidden[src.hidden * n + i];
      out[i] = config.blending_mode == BlendingMode::kLinear ? s : std::copysign(std::log1p(std::abs(s)), s);
    }
    names[j] = "f_" + std::to_string(j + 1);
  }

  return GeneratedData{
      Dataset(n, std::move(values), std::move(labels), std::move(names), static_cast<int>(config.n_classes)),
      std::move(provenance)};
}

double truth_overlap(const FeatureSubset& selection, const Provenance& provenance) {
  if (selection.indices.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t id : selection.indices) {
    if (id >= provenance.outputs.size()) {
      throw ValidationError("truth_overlap: feature id " + std::to_string(id + 1) +
                            " has no provenance record");
    }
    if (provenance.has_true_source(id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(selection.indices.size());
}

}  // namespace rfscreen
