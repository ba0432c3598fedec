#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfscreen/baselines.h"
#include "rfscreen/dataset.h"
#include "rfscreen/forest.h"
#include "rfscreen/rfms.h"

namespace rfscreen {

// Majority label among the k nearest training rows (Euclidean). Distance ties
// go to the smaller sample index, vote ties to the smaller class id.
int knn_predict(const Dataset& train, std::span<const double> query, std::size_t k);

enum class ClassifierKind { kKnn, kRandomForest, kMajority };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kKnn;
  std::size_t knn_k = 1;
  // n_subfeatures == 0 means ceil(sqrt(features)); larger values are capped
  // at the reduced feature count.
  ForestParams forest{.n_trees = 100, .n_subfeatures = 0};

  static ClassifierSpec knn(std::size_t k) { return {ClassifierKind::kKnn, k, {}}; }
  static ClassifierSpec majority() { return {ClassifierKind::kMajority, 1, {}}; }
  static ClassifierSpec random_forest(ForestParams params) {
    return {ClassifierKind::kRandomForest, 1, params};
  }

  std::string id() const;
};

// Fits on `train` and predicts every row of `test`.
std::vector<int> fit_predict(const ClassifierSpec& spec, const Dataset& train, const Dataset& test);

enum class ScreenerKind { kIdentity, kKBest, kPca, kRandom, kRfms, kFixed };

struct ScreenerSpec {
  ScreenerKind kind = ScreenerKind::kIdentity;
  std::size_t n_out = 0;  // ignored by identity; rfms uses rfms.beta
  std::uint64_t seed = kDefaultSeed;
  ScreeningConfig rfms;
  FeatureSubset fixed;  // kFixed: precomputed ranking, prefix of length n_out is used
  std::optional<PcaModel> fixed_pca;  // kFixed: precomputed projection instead of a subset

  static ScreenerSpec identity() { return {}; }
  static ScreenerSpec kbest(std::size_t k) { return make(ScreenerKind::kKBest, k); }
  static ScreenerSpec pca(std::size_t k) { return make(ScreenerKind::kPca, k); }
  static ScreenerSpec random(std::size_t k, std::uint64_t seed) {
    ScreenerSpec spec = make(ScreenerKind::kRandom, k);
    spec.seed = seed;
    return spec;
  }
  static ScreenerSpec rfms_screener(const ScreeningConfig& config);
  static ScreenerSpec fixed_subset(FeatureSubset subset);
  static ScreenerSpec fixed_projection(PcaModel model);

  // Same screener, producing `count` outputs. Identity is returned unchanged.
  ScreenerSpec with_count(std::size_t count) const;
  std::size_t output_count(std::size_t n_features) const;
  bool transforming() const { return kind == ScreenerKind::kPca || fixed_pca.has_value(); }
  std::string id() const;

 private:
  static ScreenerSpec make(ScreenerKind kind, std::size_t n_out) {
    ScreenerSpec spec;
    spec.kind = kind;
    spec.n_out = n_out;
    return spec;
  }
};

// Result of fitting a screener: either a column subset or a PCA projection.
struct Reduction {
  FeatureSubset subset;
  std::optional<PcaModel> pca;
  bool identity = false;

  Dataset apply(const Dataset& data) const;
  std::size_t output_count(std::size_t n_features) const;
};

// The screener only ever sees `train`, never any held-out rows. RFMS canaries
// that survive screening are dropped from the reduction (they do not exist in
// the caller's data).
Reduction fit_screener(const ScreenerSpec& spec, const Dataset& train);

struct CvOptions {
  std::size_t folds = 5;
  std::uint64_t seed = kDefaultSeed;
  // true: fit the screener inside each fold on that fold's training rows.
  // false: screen once on all rows, then cross-validate the classifier only.
  bool leak_safe = true;
};

struct ReportEntry {
  std::string screener;
  std::string classifier;
  std::size_t n_features_out = 0;
  bool transforming = false;
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracies;
  std::vector<std::size_t> fold_sizes;
  double screening_cpu_seconds = 0.0;
  double fitting_cpu_seconds = 0.0;
};

struct EvaluationReport {
  std::vector<ReportEntry> entries;
  std::size_t best = 0;  // index of the highest mean accuracy, first on ties

  const ReportEntry& best_entry() const { return entries.at(best); }
};

ReportEntry cross_validate(const Dataset& dataset, const ScreenerSpec& screener,
                           const ClassifierSpec& classifier, const CvOptions& options);

// Every (screener, classifier) pair, screeners in the outer loop.
EvaluationReport grid_search(const Dataset& dataset, std::span<const ScreenerSpec> screeners,
                             std::span<const ClassifierSpec> classifiers, const CvOptions& options);

struct SweepRow {
  std::size_t n_features_out = 0;
  double best_accuracy = 0.0;
  std::string best_classifier;
  EvaluationReport report;
};

// One row per count: the screener is rerun with that output count and the
// best mean accuracy over `classifiers` is reported.
std::vector<SweepRow> convergence_sweep(const Dataset& dataset, const ScreenerSpec& screener,
                                        std::span<const ClassifierSpec> classifiers,
                                        std::span<const std::size_t> counts, const CvOptions& options);

}  // namespace rfscreen
