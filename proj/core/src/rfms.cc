#include "rfscreen/rfms.h"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "rfscreen/cpu_timer.h"
#include "rfscreen/error.h"

namespace rfscreen {

void ScreeningConfig::validate(std::size_t n_features) const {
  if (beta < 1) throw ValidationError("reduced-size must be >= 1");
  if (beta > alpha) {
    throw ValidationError("reduced-size (" + std::to_string(beta) + ") exceeds step-size (" +
                          std::to_string(alpha) + ")");
  }
  if (alpha > n_features) {
    throw ValidationError("step-size (" + std::to_string(alpha) + ") exceeds feature count (" +
                          std::to_string(n_features) + ")");
  }
  forest.validate();
}

std::vector<std::size_t> permute_features(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(stream_seed(seed, streams::kPermutation, 0));
  rng.shuffle(perm);
  return perm;
}

std::vector<std::vector<std::size_t>> partition(std::span<const std::size_t> permutation,
                                                std::size_t alpha) {
  if (alpha == 0) throw ValidationError("partition: step-size must be positive");
  if (alpha > permutation.size()) throw ValidationError("partition: step-size exceeds feature count");
  std::vector<std::vector<std::size_t>> chunks;
  chunks.reserve((permutation.size() + alpha - 1) / alpha);
  for (std::size_t start = 0; start < permutation.size(); start += alpha) {
    const std::size_t stop = std::min(start + alpha, permutation.size());
    chunks.emplace_back(permutation.begin() + static_cast<std::ptrdiff_t>(start),
                        permutation.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return chunks;
}

std::vector<double> canary_values(std::size_t n_samples, std::size_t n_canaries, std::uint64_t seed) {
  std::vector<double> values(n_samples * n_canaries);
  for (std::size_t c = 0; c < n_canaries; ++c) {
    Rng rng(stream_seed(seed, streams::kCanary, c));
    for (std::size_t i = 0; i < n_samples; ++i) values[c * n_samples + i] = rng.normal();
  }
  return values;
}

std::vector<std::size_t> rank_pool(std::span<const std::size_t> pool_ids,
                                   std::span<const std::size_t> importance, std::size_t keep) {
  std::vector<std::size_t> order(pool_ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (importance[a] != importance[b]) return importance[a] > importance[b];
    return pool_ids[a] < pool_ids[b];
  });
  keep = std::min(keep, order.size());
  std::vector<std::size_t> out(keep);
  for (std::size_t i = 0; i < keep; ++i) out[i] = pool_ids[order[i]];
  return out;
}

ScreeningResult screen(const Dataset& dataset, const ScreeningConfig& config) {
  const CpuTimer timer;
  if (dataset.n_samples() == 0) throw ValidationError("screen: dataset is empty");
  if (dataset.distinct_classes() < 2) {
    throw ValidationError("screen: dataset has a single class; selection frequency is undefined");
  }

  ScreeningResult result;
  result.n_original_features = dataset.n_features();

  Dataset augmented;
  if (config.n_canaries > 0) {
    std::vector<std::string> names;
    names.reserve(config.n_canaries);
    std::unordered_set<std::string> taken(dataset.feature_names().begin(), dataset.feature_names().end());
    for (std::size_t c = 0; c < config.n_canaries; ++c) {
      std::string name = "canary_" + std::to_string(c + 1);
      while (taken.count(name)) name = "_" + name;
      names.push_back(std::move(name));
    }
    augmented = dataset.with_appended_columns(
        canary_values(dataset.n_samples(), config.n_canaries, config.seed), std::move(names));
    for (std::size_t c = 0; c < config.n_canaries; ++c) {
      result.canary_ids.push_back(dataset.n_features() + c);
    }
  } else {
    augmented = dataset;
  }
  const std::size_t n = augmented.n_features();
  config.validate(n);

  result.feature_names = augmented.feature_names();
  result.permutation = permute_features(n, config.seed);
  const auto chunks = partition(result.permutation, config.alpha);

  std::vector<std::size_t> carry;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    RoundRecord record;
    record.round = i + 1;
    record.chunk = chunks[i];
    record.carried = carry;

    std::vector<std::size_t> pool = record.chunk;
    pool.insert(pool.end(), carry.begin(), carry.end());

    ForestParams params = config.forest;
    params.seed = stream_seed(config.forest.seed, streams::kRound, record.round);
    params.n_subfeatures = std::min(params.n_subfeatures, pool.size());
    const ForestModel model = train_forest(augmented.select_columns(pool), params);

    record.importance = selection_frequency(model);
    record.selected = rank_pool(pool, record.importance, config.beta);
    carry = record.selected;
    result.rounds.push_back(std::move(record));
  }

  result.selected.indices = carry;
  result.canary_leak_count = canary_audit(result).leak_count;
  result.wall_seconds = timer.wall_seconds();
  result.cpu_seconds = timer.cpu_seconds();
  return result;
}

CanaryAudit canary_audit(const ScreeningResult& result) {
  CanaryAudit audit;
  const std::unordered_set<std::size_t> canaries(result.canary_ids.begin(), result.canary_ids.end());
  for (std::size_t id : result.selected.indices) {
    if (canaries.count(id)) audit.leaked.push_back(id);
  }
  audit.leak_count = audit.leaked.size();
  return audit;
}

}  // namespace rfscreen
