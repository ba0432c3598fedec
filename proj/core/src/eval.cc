#include "rfscreen/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rfscreen/cpu_timer.h"
#include "rfscreen/error.h"

namespace rfscreen {
namespace {

int vote(std::span<const std::size_t> votes) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return static_cast<int>(best) + 1;
}

}  // namespace

int knn_predict(const Dataset& train, std::span<const double> query, std::size_t k) {
  if (query.size() != train.n_features()) {
    throw ValidationError("knn: query has " + std::to_string(query.size()) + " features, training data has " +
                          std::to_string(train.n_features()));
  }
  if (k == 0 || k > train.n_samples()) {
    throw ValidationError("knn: k=" + std::to_string(k) + " must lie in [1, " +
                          std::to_string(train.n_samples()) + "]");
  }
  const std::size_t n = train.n_samples();
  std::vector<double> dist(n, 0.0);
  for (std::size_t f = 0; f < train.n_features(); ++f) {
    const auto col = train.column(f);
    const double q = query[f];
    for (std::size_t i = 0; i < n; ++i) {
      const double d = col[i] - q;
      dist[i] += d * d;
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto closer = [&](std::size_t a, std::size_t b) {
    return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
  std::vector<std::size_t> votes(static_cast<std::size_t>(train.n_classes()), 0);
  for (std::size_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(train.label(order[i]) - 1)];
  return vote(votes);
}

std::string ClassifierSpec::id() const {
  switch (kind) {
    case ClassifierKind::kKnn:
      return "knn(k=" + std::to_string(knn_k) + ")";
    case ClassifierKind::kMajority:
      return "majority";
    case ClassifierKind::kRandomForest: {
      std::ostringstream out;
      out << "rf(n_trees=" << forest.n_trees << ",n_subfeatures=" << forest.n_subfeatures
          << ",min_samples_leaf=" << forest.min_samples_leaf
          << ",min_purity_increase=" << forest.min_purity_increase << ")";
      return out.str();
    }
  }
  return "unknown";
}

std::vector<int> fit_predict(const ClassifierSpec& spec, const Dataset& train, const Dataset& test) {
  if (train.n_features() != test.n_features()) {
    throw ValidationError("fit_predict: train and test feature counts differ");
  }
  std::vector<int> out(test.n_samples());
  switch (spec.kind) {
    case ClassifierKind::kKnn:
      for (std::size_t i = 0; i < test.n_samples(); ++i) out[i] = knn_predict(train, test.row(i), spec.knn_k);
      break;
    case ClassifierKind::kMajority: {
      const auto counts = train.class_counts();
      std::fill(out.begin(), out.end(), vote(counts));
      break;
    }
    case ClassifierKind::kRandomForest: {
      ForestParams params = spec.forest;
      const std::size_t p = train.n_features();
      if (params.n_subfeatures == 0) {
        params.n_subfeatures = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));
      }
      params.n_subfeatures = std::clamp<std::size_t>(params.n_subfeatures, 1, p);
      const ForestModel model = train_forest(train, params);
      for (std::size_t i = 0; i < test.n_samples(); ++i) out[i] = forest_predict(model, test.row(i));
      break;
    }
  }
  return out;
}

ScreenerSpec ScreenerSpec::rfms_screener(const ScreeningConfig& config) {
  ScreenerSpec spec;
  spec.kind = ScreenerKind::kRfms;
  spec.n_out = config.beta;
  spec.seed = config.seed;
  spec.rfms = config;
  return spec;
}

ScreenerSpec ScreenerSpec::fixed_subset(FeatureSubset subset) {
  ScreenerSpec spec;
  spec.kind = ScreenerKind::kFixed;
  spec.n_out = subset.size();
  spec.fixed = std::move(subset);
  return spec;
}

ScreenerSpec ScreenerSpec::fixed_projection(PcaModel model) {
  ScreenerSpec spec;
  spec.kind = ScreenerKind::kFixed;
  spec.n_out = model.n_components;
  spec.fixed_pca = std::move(model);
  return spec;
}

ScreenerSpec ScreenerSpec::with_count(std::size_t count) const {
  ScreenerSpec out = *this;
  if (kind == ScreenerKind::kIdentity) return out;
  out.n_out = count;
  if (kind == ScreenerKind::kRfms) out.rfms.beta = count;
  if (kind == ScreenerKind::kFixed && fixed_pca) {
    throw ValidationError("screener: a precomputed projection has a fixed component count");
  }
  if (kind == ScreenerKind::kFixed && count > fixed.size()) {
    throw ValidationError("screener: requested " + std::to_string(count) +
                          " features from a precomputed selection of " + std::to_string(fixed.size()));
  }
  return out;
}

std::size_t ScreenerSpec::output_count(std::size_t n_features) const {
  return kind == ScreenerKind::kIdentity ? n_features : n_out;
}

std::string ScreenerSpec::id() const {
  switch (kind) {
    case ScreenerKind::kIdentity:
      return "none";
    case ScreenerKind::kKBest:
      return "kbest(k=" + std::to_string(n_out) + ")";
    case ScreenerKind::kPca:
      return "pca(components=" + std::to_string(n_out) + ")";
    case ScreenerKind::kRandom:
      return "random(k=" + std::to_string(n_out) + ",seed=" + std::to_string(seed) + ")";
    case ScreenerKind::kFixed:
      return std::string(fixed_pca ? "fixed_pca" : "fixed") + "(k=" + std::to_string(n_out) + ")";
    case ScreenerKind::kRfms: {
      std::ostringstream out;
      out << "rfms(reduced_size=" << rfms.beta << ",step_size=" << rfms.alpha
          << ",n_trees=" << rfms.forest.n_trees << ",n_subfeatures=" << rfms.forest.n_subfeatures
          << ",min_samples_leaf=" << rfms.forest.min_samples_leaf
          << ",min_purity_increase=" << rfms.forest.min_purity_increase
          << ",partial_sampling=" << rfms.forest.partial_sampling << ",n_canaries=" << rfms.n_canaries
          << ")";
      return out.str();
    }
  }
  return "unknown";
}

Dataset Reduction::apply(const Dataset& data) const {
  if (identity) return data;
  if (pca) return pca_transform(*pca, data);
  return data.select_columns(subset.indices);
}

std::size_t Reduction::output_count(std::size_t n_features) const {
  if (identity) return n_features;
  if (pca) return pca->n_components;
  return subset.size();
}

Reduction fit_screener(const ScreenerSpec& spec, const Dataset& train) {
  Reduction out;
  switch (spec.kind) {
    case ScreenerKind::kIdentity:
      out.identity = true;
      break;
    case ScreenerKind::kKBest:
      out.subset = kbest_fscore(train, spec.n_out);
      break;
    case ScreenerKind::kPca:
      out.pca = pca_fit(train, spec.n_out);
      break;
    case ScreenerKind::kRandom:
      out.subset = random_subset(train.n_features(), spec.n_out, spec.seed);
      break;
    case ScreenerKind::kFixed:
      if (spec.fixed_pca) {
        if (spec.fixed_pca->n_features != train.n_features()) {
          throw ValidationError("screener: projection expects " + std::to_string(spec.fixed_pca->n_features) +
                                " features, data has " + std::to_string(train.n_features()));
        }
        out.pca = spec.fixed_pca;
        break;
      }
      spec.fixed.validate(train.n_features());
      if (spec.n_out > spec.fixed.size()) throw ValidationError("screener: fixed subset too short");
      out.subset.indices.assign(spec.fixed.indices.begin(),
                                spec.fixed.indices.begin() + static_cast<std::ptrdiff_t>(spec.n_out));
      break;
    case ScreenerKind::kRfms: {
      const ScreeningResult result = screen(train, spec.rfms);
      for (std::size_t id : result.selected.indices) {
        if (id < result.n_original_features) out.subset.indices.push_back(id);
      }
      break;
    }
  }
  return out;
}

namespace {

double accuracy(std::span<const int> predicted, const Dataset& truth) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth.label(i) ? 1 : 0;
  return predicted.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(predicted.size());
}

// Cross-validates `classifier`. With a precomputed reduction the screener is
// not refit; otherwise it is fit inside every fold.
ReportEntry run_cv(const Dataset& dataset, const ScreenerSpec& screener, const ClassifierSpec& classifier,
                   const CvOptions& options, const Reduction* shared, double shared_screen_seconds) {
  const auto folds = stratified_kfold(dataset, options.folds, options.seed);
  ReportEntry entry;
  entry.screener = screener.id();
  entry.classifier = classifier.id();
  entry.transforming = screener.transforming();
  entry.n_features_out = screener.output_count(dataset.n_features());
  entry.screening_cpu_seconds = shared ? shared_screen_seconds : 0.0;

  const bool is_identity = screener.kind == ScreenerKind::kIdentity;
  for (const Fold& fold : folds) {
    Dataset train = dataset.select_rows(fold.train);
    Dataset test = dataset.select_rows(fold.test);
    if (shared) {
      train = shared->apply(train);
      test = shared->apply(test);
    } else if (!is_identity) {
      const CpuTimer screen_timer;
      const Reduction reduction = fit_screener(screener, train);
      train = reduction.apply(train);
      test = reduction.apply(test);
      entry.screening_cpu_seconds += screen_timer.cpu_seconds();
    }
    entry.n_features_out = train.n_features();
    const CpuTimer fit_timer;
    const auto predicted = fit_predict(classifier, train, test);
    entry.fitting_cpu_seconds += fit_timer.cpu_seconds();
    entry.fold_accuracies.push_back(accuracy(predicted, test));
    entry.fold_sizes.push_back(fold.test.size());
  }
  entry.mean_accuracy = std::accumulate(entry.fold_accuracies.begin(), entry.fold_accuracies.end(), 0.0) /
                        static_cast<double>(entry.fold_accuracies.size());
  if (is_identity) entry.screening_cpu_seconds = 0.0;
  return entry;
}

std::pair<Reduction, double> screen_all_rows(const ScreenerSpec& screener, const Dataset& dataset) {
  if (screener.kind == ScreenerKind::kIdentity) {
    Reduction identity;
    identity.identity = true;
    return {std::move(identity), 0.0};
  }
  const CpuTimer timer;
  Reduction reduction = fit_screener(screener, dataset);
  return {std::move(reduction), timer.cpu_seconds()};
}

}  // namespace

ReportEntry cross_validate(const Dataset& dataset, const ScreenerSpec& screener,
                           const ClassifierSpec& classifier, const CvOptions& options) {
  if (options.leak_safe) return run_cv(dataset, screener, classifier, options, nullptr, 0.0);
  const auto [reduction, seconds] = screen_all_rows(screener, dataset);
  return run_cv(dataset, screener, classifier, options, &reduction, seconds);
}

EvaluationReport grid_search(const Dataset& dataset, std::span<const ScreenerSpec> screeners,
                             std::span<const ClassifierSpec> classifiers, const CvOptions& options) {
  if (screeners.empty() || classifiers.empty()) throw ValidationError("grid_search: empty parameter grid");
  EvaluationReport report;
  for (const ScreenerSpec& screener : screeners) {
    if (options.leak_safe) {
      for (const ClassifierSpec& classifier : classifiers) {
        report.entries.push_back(run_cv(dataset, screener, classifier, options, nullptr, 0.0));
      }
    } else {
      // Screen once per screener; every classifier cell reuses the reduction.
      const auto [reduction, seconds] = screen_all_rows(screener, dataset);
      for (const ClassifierSpec& classifier : classifiers) {
        report.entries.push_back(run_cv(dataset, screener, classifier, options, &reduction, seconds));
      }
    }
  }
  for (std::size_t i = 1; i < report.entries.size(); ++i) {
    if (report.entries[i].mean_accuracy > report.entries[report.best].mean_accuracy) report.best = i;
  }
  return report;
}

std::vector<SweepRow> convergence_sweep(const Dataset& dataset, const ScreenerSpec& screener,
                                        std::span<const ClassifierSpec> classifiers,
                                        std::span<const std::size_t> counts, const CvOptions& options) {
  for (std::size_t c : counts) {
    if (c == 0 || c > dataset.n_features()) {
      throw ValidationError("sweep: feature count " + std::to_string(c) + " outside [1, " +
                            std::to_string(dataset.n_features()) + "]");
    }
  }
  std::vector<SweepRow> rows;
  for (std::size_t c : counts) {
    const ScreenerSpec spec = screener.with_count(c);
    SweepRow row;
    row.report = grid_search(dataset, std::span(&spec, 1), classifiers, options);
    row.n_features_out = spec.output_count(dataset.n_features());
    row.best_accuracy = row.report.best_entry().mean_accuracy;
    row.best_classifier = row.report.best_entry().classifier;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rfscreen
