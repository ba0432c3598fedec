#include "rfscreen/forest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "rfscreen/error.h"

namespace rfscreen {

void ForestParams::validate() const {
  if (n_trees == 0) throw ValidationError("n-trees must be positive");
  if (n_subfeatures == 0) throw ValidationError("n-subfeatures must be positive");
  if (min_samples_leaf == 0) throw ValidationError("min-samples-leaf must be positive");
  if (!(min_purity_increase >= 0.0) || !std::isfinite(min_purity_increase)) {
    throw ValidationError("min-purity-increase must be a nonnegative number");
  }
  if (!(partial_sampling > 0.0 && partial_sampling <= 1.0)) {
    throw ValidationError("partial-sampling must lie in (0, 1]");
  }
}

namespace {

// Gini impurity from the sum of squared counts; exact integer accumulation
// keeps mirrored count vectors bit-identical.
double gini_from_sumsq(std::size_t sumsq, std::size_t total) {
  const double t = static_cast<double>(total);
  return 1.0 - static_cast<double>(sumsq) / (t * t);
}

int argmax_class(std::span<const std::size_t> counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<int>(best) + 1;
}

}  // namespace

double gini_impurity(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  std::size_t sumsq = 0;
  for (std::size_t c : class_counts) {
    total += c;
    sumsq += c * c;
  }
  if (total == 0) throw ValidationError("gini_impurity: all class counts are zero");
  return gini_from_sumsq(sumsq, total);
}

namespace {

// Ties between features go to the one listed first in `features`.
std::optional<SplitCandidate> best_split_in_order(const Dataset& data, std::span<const std::size_t> samples,
                                                  std::span<const std::size_t> features,
                                                  std::size_t min_samples_leaf, double min_purity_increase) {
  const std::size_t n = samples.size();
  if (n < 2) return std::nullopt;
  const std::size_t msl = std::max<std::size_t>(min_samples_leaf, 1);
  if (n < 2 * msl) return std::nullopt;

  const auto n_classes = static_cast<std::size_t>(data.n_classes());
  std::vector<std::size_t> parent(n_classes, 0);
  for (std::size_t s : samples) ++parent[static_cast<std::size_t>(data.label(s) - 1)];
  std::size_t parent_sumsq = 0;
  for (std::size_t c : parent) parent_sumsq += c * c;
  const double parent_gini = gini_from_sumsq(parent_sumsq, n);
  if (parent_gini <= 0.0) return std::nullopt;

  std::optional<SplitCandidate> best;
  std::vector<std::pair<double, int>> sorted(n);
  std::vector<std::size_t> left(n_classes);
  const double nd = static_cast<double>(n);

  for (std::size_t f : features) {
    const auto col = data.column(f);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = {col[samples[i]], data.label(samples[i])};
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front().first == sorted.back().first) continue;

    std::fill(left.begin(), left.end(), 0);
    std::size_t left_sumsq = 0;
    std::size_t right_sumsq = parent_sumsq;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto c = static_cast<std::size_t>(sorted[i].second - 1);
      left_sumsq += 2 * left[c] + 1;
      const std::size_t right_c = parent[c] - left[c];
      right_sumsq -= 2 * right_c - 1;
      ++left[c];

      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      if (nl < msl) continue;
      if (nr < msl) break;
      const double lo = sorted[i].first;
      const double hi = sorted[i + 1].first;
      if (!(lo < hi)) continue;

      const double decrease = parent_gini -
                              (static_cast<double>(nl) / nd) * gini_from_sumsq(left_sumsq, nl) -
                              (static_cast<double>(nr) / nd) * gini_from_sumsq(right_sumsq, nr);
      if (decrease <= kSplitTolerance || decrease + kSplitTolerance < min_purity_increase) continue;
      if (best && decrease <= best->impurity_decrease + kSplitTolerance) continue;

      double threshold = std::midpoint(lo, hi);
      if (!(threshold < hi)) threshold = lo;
      best = SplitCandidate{f, threshold, decrease};
    }
  }
  return best;
}

}  // namespace

std::optional<SplitCandidate> best_split(const Dataset& data, std::span<const std::size_t> samples,
                                         std::span<const std::size_t> candidate_features,
                                         std::size_t min_samples_leaf, double min_purity_increase) {
  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return best_split_in_order(data, samples, features, min_samples_leaf, min_purity_increase);
}

namespace {

struct PendingNode {
  std::uint32_t index;
  std::vector<std::size_t> samples;
};

Tree grow_tree(const Dataset& data, const ForestParams& params, std::size_t tree_index) {
  Rng rng(stream_seed(params.seed, streams::kTree, tree_index));
  const std::size_t n = data.n_samples();
  const auto n_classes = static_cast<std::size_t>(data.n_classes());

  const auto draw = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(params.partial_sampling * static_cast<double>(n))));
  std::vector<std::size_t> bootstrap(draw);
  for (auto& s : bootstrap) s = static_cast<std::size_t>(rng.below(n));
  std::sort(bootstrap.begin(), bootstrap.end());

  std::vector<std::size_t> feature_pool(data.n_features());
  std::iota(feature_pool.begin(), feature_pool.end(), 0);
  const std::size_t k = std::min(params.n_subfeatures, data.n_features());

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<PendingNode> stack;
  stack.push_back({0, std::move(bootstrap)});

  while (!stack.empty()) {
    PendingNode pending = std::move(stack.back());
    stack.pop_back();
    const std::vector<std::size_t>& samples = pending.samples;

    std::vector<std::size_t> counts(n_classes, 0);
    for (std::size_t s : samples) ++counts[static_cast<std::size_t>(data.label(s) - 1)];
    const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;

    std::optional<SplitCandidate> split;
    if (!pure && samples.size() >= 2 * params.min_samples_leaf) {
      rng.partial_shuffle(feature_pool, k);
      // Candidates stay in draw order: breaking ties by column index would
      // favour low columns in the selection frequency.
      split = best_split_in_order(data, samples, std::span(feature_pool).first(k),
                                  params.min_samples_leaf, params.min_purity_increase);
    }

    TreeNode& node = tree.nodes[pending.index];
    node.n_samples = samples.size();
    if (!split) {
      node.kind = LeafNode{argmax_class(counts), std::move(counts)};
      continue;
    }

    std::vector<std::size_t> left_samples;
    std::vector<std::size_t> right_samples;
    const auto col = data.column(split->feature);
    for (std::size_t s : samples) {
      (col[s] <= split->threshold ? left_samples : right_samples).push_back(s);
    }
    const auto left = static_cast<std::uint32_t>(tree.nodes.size());
    const auto right = left + 1;
    node.kind = SplitNode{split->feature, split->threshold, left, right, split->impurity_decrease};
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    // Right is pushed first so the left subtree is grown first.
    stack.push_back({right, std::move(right_samples)});
    stack.push_back({left, std::move(left_samples)});
  }
  return tree;
}

}  // namespace

int Tree::predict(std::span<const double> features) const {
  std::uint32_t at = 0;
  while (true) {
    const TreeNode& node = nodes[at];
    if (node.is_leaf()) return node.leaf().class_id;
    const SplitNode& s = node.split();
    at = features[s.feature] <= s.threshold ? s.left : s.right;
  }
}

std::size_t Tree::internal_node_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

ForestModel train_forest(const Dataset& data, const ForestParams& params) {
  params.validate();
  if (data.n_samples() == 0) throw ValidationError("train_forest: dataset is empty");
  if (data.n_features() == 0) throw ValidationError("train_forest: dataset has no features");
  if (params.n_subfeatures > data.n_features()) {
    throw ValidationError("train_forest: n-subfeatures (" + std::to_string(params.n_subfeatures) +
                          ") exceeds feature count (" + std::to_string(data.n_features()) + ")");
  }

  std::vector<Tree> trees(params.n_trees);
  std::size_t workers = params.n_threads == 0 ? std::thread::hardware_concurrency() : params.n_threads;
  workers = std::clamp<std::size_t>(workers, 1, params.n_trees);

  if (workers == 1) {
    for (std::size_t t = 0; t < params.n_trees; ++t) trees[t] = grow_tree(data, params, t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t t = next++; t < params.n_trees; t = next++) {
            try {
              trees[t] = grow_tree(data, params, t);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  return ForestModel(std::move(trees), data.n_features(), data.n_classes(), params);
}

int forest_predict(const ForestModel& model, std::span<const double> features) {
  if (features.size() != model.n_features()) {
    throw ValidationError("forest_predict: expected " + std::to_string(model.n_features()) +
                          " features, got " + std::to_string(features.size()));
  }
  std::vector<std::size_t> votes(static_cast<std::size_t>(model.n_classes()), 0);
  for (const Tree& tree : model.trees()) ++votes[static_cast<std::size_t>(tree.predict(features) - 1)];
  return argmax_class(votes);
}

std::vector<std::size_t> selection_frequency(const ForestModel& model) {
  std::vector<std::size_t> counts(model.n_features(), 0);
  for (const Tree& tree : model.trees()) {
    for (const TreeNode& node : tree.nodes) {
      if (!node.is_leaf()) ++counts[node.split().feature];
    }
  }
  return counts;
}

void write_forest_text(std::ostream& out, const ForestModel& model) {
  const auto old_precision = out.precision(17);
  out << "forest trees=" << model.trees().size() << " features=" << model.n_features()
      << " classes=" << model.n_classes() << '\n';
  for (std::size_t t = 0; t < model.trees().size(); ++t) {
    const Tree& tree = model.trees()[t];
    out << "tree " << t << " nodes=" << tree.nodes.size() << '\n';
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const TreeNode& node = tree.nodes[i];
      out << "  " << i << ' ';
      if (node.is_leaf()) {
        out << "leaf class=" << node.leaf().class_id << " counts=";
        const auto& counts = node.leaf().class_counts;
        for (std::size_t c = 0; c < counts.size(); ++c) out << (c ? "," : "") << counts[c];
      } else {
        const SplitNode& s = node.split();
        out << "split feature=" << s.feature << " threshold=" << s.threshold << " left=" << s.left
            << " right=" << s.right << " decrease=" << s.impurity_decrease;
      }
      out << " n=" << node.n_samples << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace rfscreen
