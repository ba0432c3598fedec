#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rfscreen/dataset.h"
#include "rfscreen/rng.h"

namespace rfscreen {

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t n_subfeatures = 1;  // candidate features drawn per split
  std::size_t min_samples_leaf = 1;
  double min_purity_increase = 0.0;
  double partial_sampling = 0.7;  // bootstrap size as a fraction of N
  std::uint64_t seed = kDefaultSeed;
  std::size_t n_threads = 1;  // 0 = hardware concurrency; never changes the output

  // Checks ranges that do not depend on the data.
  void validate() const;
};

// Split comparisons treat decreases closer than this as equal, so that tie
// breaking does not hinge on the last bit of floating-point rounding.
inline constexpr double kSplitTolerance = 1e-12;

struct SplitNode {
  std::size_t feature = 0;
  double threshold = 0.0;  // samples with value <= threshold go left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double impurity_decrease = 0.0;

  friend bool operator==(const SplitNode&, const SplitNode&) = default;
};

struct LeafNode {
  int class_id = 1;
  std::vector<std::size_t> class_counts;  // indexed by class id - 1

  friend bool operator==(const LeafNode&, const LeafNode&) = default;
};

struct TreeNode {
  std::variant<SplitNode, LeafNode> kind;
  std::size_t n_samples = 0;

  bool is_leaf() const { return std::holds_alternative<LeafNode>(kind); }
  const SplitNode& split() const { return std::get<SplitNode>(kind); }
  const LeafNode& leaf() const { return std::get<LeafNode>(kind); }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Binary CART tree stored as a flat node array; nodes[0] is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  int predict(std::span<const double> features) const;
  std::size_t internal_node_count() const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::vector<Tree> trees, std::size_t n_features, int n_classes, ForestParams params)
      : trees_(std::move(trees)), n_features_(n_features), n_classes_(n_classes), params_(params) {}

  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t n_features() const { return n_features_; }
  int n_classes() const { return n_classes_; }
  const ForestParams& params() const { return params_; }

 private:
  std::vector<Tree> trees_;
  std::size_t n_features_ = 0;
  int n_classes_ = 0;
  ForestParams params_;
};

// 1 - sum p_i^2. Throws ValidationError if every count is zero.
double gini_impurity(std::span<const std::size_t> class_counts);

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

// Exhaustive search for the split with the largest weighted Gini decrease.
// Thresholds are midpoints of consecutive distinct values. A split qualifies
// when both sides hold at least min_samples_leaf samples and its decrease is
// positive and at least min_purity_increase. Ties go to the lower feature
// index, then the lower threshold.
std::optional<SplitCandidate> best_split(const Dataset& data, std::span<const std::size_t> samples,
                                         std::span<const std::size_t> candidate_features,
                                         std::size_t min_samples_leaf, double min_purity_increase);

// Grows params.n_trees trees. Tree t bootstraps floor(partial_sampling * N)
// samples with replacement from its own stream keyed by (seed, t), so the
// result does not depend on params.n_threads.
ForestModel train_forest(const Dataset& data, const ForestParams& params);

// Majority vote; ties go to the smallest class id.
int forest_predict(const ForestModel& model, std::span<const double> features);

// Per-feature count of internal nodes splitting on that feature.
std::vector<std::size_t> selection_frequency(const ForestModel& model);

// Plain-text dump, one "tree" record per tree. See README for the layout.
void write_forest_text(std::ostream& out, const ForestModel& model);

}  // namespace rfscreen
