#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "oracles.h"
#include "rfscreen/error.h"
#include "rfscreen/eval.h"

namespace rfscreen {
namespace {

TEST(Knn, Examples) {
  const Dataset train(4, {0, 1, 10, 11}, {1, 1, 2, 2}, {"x"});
  EXPECT_EQ(knn_predict(train, std::vector<double>{0.4}, 1), 1);
  EXPECT_EQ(knn_predict(train, std::vector<double>{9.0}, 1), 2);
  EXPECT_EQ(knn_predict(train, std::vector<double>{9.0}, 3), 2);
  // Equidistant neighbours: the smaller sample index wins.
  EXPECT_EQ(knn_predict(train, std::vector<double>{5.5}, 1), 1);
  // Two votes each: the smaller class id wins.
  EXPECT_EQ(knn_predict(train, std::vector<double>{5.5}, 4), 1);
  EXPECT_THROW(knn_predict(train, std::vector<double>{0.0}, 0), ValidationError);
  EXPECT_THROW(knn_predict(train, std::vector<double>{0.0}, 5), ValidationError);
  EXPECT_THROW(knn_predict(train, std::vector<double>{0.0, 1.0}, 1), ValidationError);
}

TEST(Knn, MatchesFullSortOracle) {
  Rng rng(50);
  for (int trial = 0; trial < 100; ++trial) {
    const Dataset train = oracle::random_dataset(rng, 5 + rng.below(30), 1 + rng.below(4), 2 + static_cast<int>(rng.below(3)));
    std::vector<double> q(train.n_features());
    for (auto& v : q) v = rng.normal();
    const std::size_t k = 1 + rng.below(train.n_samples());
    EXPECT_EQ(knn_predict(train, q, k), oracle::knn(train, q, k)) << "trial " << trial;
  }
}

// Each class is a single repeated point, so 1-NN memorises it exactly.
Dataset memorisation_data() {
  std::vector<double> values;
  std::vector<int> labels;
  const std::size_t k = 4, per = 10;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < per; ++i) labels.push_back(static_cast<int>(c) + 1);
  }
  for (std::size_t f = 0; f < 3; ++f) {
    for (int y : labels) values.push_back(static_cast<double>(y * (f + 1)));
  }
  const std::size_t n = labels.size();
  return Dataset(n, std::move(values), std::move(labels), {"a", "b", "c"});
}

TEST(CrossValidate, MemorisationIsPerfect) {
  const ReportEntry e = cross_validate(memorisation_data(), ScreenerSpec::identity(), ClassifierSpec::knn(1), {});
  EXPECT_DOUBLE_EQ(e.mean_accuracy, 1.0);
  EXPECT_EQ(e.fold_accuracies.size(), 5u);
  EXPECT_EQ(std::accumulate(e.fold_sizes.begin(), e.fold_sizes.end(), std::size_t{0}), 40u);
  EXPECT_EQ(e.screener, "none");
  EXPECT_EQ(e.classifier, "knn(k=1)");
  EXPECT_EQ(e.n_features_out, 3u);
  EXPECT_EQ(e.screening_cpu_seconds, 0.0);
  const ReportEntry rf = cross_validate(memorisation_data(), ScreenerSpec::identity(),
                                        ClassifierSpec::random_forest({.n_trees = 10, .n_subfeatures = 0}), {});
  EXPECT_DOUBLE_EQ(rf.mean_accuracy, 1.0);
}

TEST(CrossValidate, MajorityBaselineIsChance) {
  Rng rng(1);
  const Dataset d = oracle::random_dataset(rng, 100, 3, 4);
  const ReportEntry e = cross_validate(d, ScreenerSpec::identity(), ClassifierSpec::majority(), {});
  EXPECT_NEAR(e.mean_accuracy, 0.25, 1e-12);
}

// Straight-line recomputation of (k-best, kNN) cross-validation.
TEST(CrossValidate, KBestKnnMatchesManualLoop) {
  Rng rng(12);
  const Dataset d = oracle::random_dataset(rng, 60, 8, 3);
  const CvOptions options{.folds = 4, .seed = 77, .leak_safe = true};
  const ReportEntry e = cross_validate(d, ScreenerSpec::kbest(3), ClassifierSpec::knn(3), options);
  const auto folds = stratified_kfold(d, 4, 77);
  double sum = 0;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    const Dataset train = d.select_rows(folds[k].train);
    const Dataset test = d.select_rows(folds[k].test);
    const auto scores = anova_fscores(train);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
    order.resize(3);
    const Dataset rtrain = train.select_columns(order);
    const Dataset rtest = test.select_columns(order);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < rtest.n_samples(); ++i) {
      const auto row = rtest.row(i);
      hits += oracle::knn(rtrain, std::vector<double>(row.begin(), row.end()), 3) == rtest.label(i);
    }
    const double acc = static_cast<double>(hits) / static_cast<double>(rtest.n_samples());
    EXPECT_NEAR(e.fold_accuracies[k], acc, 1e-12);
    sum += acc;
  }
  EXPECT_NEAR(e.mean_accuracy, sum / 4.0, 1e-12);
}

TEST(CrossValidate, LeakyModeScreensOnceOnAllRows) {
  Rng rng(2);
  const Dataset d = oracle::random_dataset(rng, 60, 30, 3);
  const CvOptions safe{.folds = 3, .seed = 5, .leak_safe = true};
  const CvOptions leaky{.folds = 3, .seed = 5, .leak_safe = false};
  const ReportEntry a = cross_validate(d, ScreenerSpec::kbest(2), ClassifierSpec::knn(1), safe);
  const ReportEntry b = cross_validate(d, ScreenerSpec::kbest(2), ClassifierSpec::knn(1), leaky);
  EXPECT_EQ(a.n_features_out, 2u);
  EXPECT_EQ(b.n_features_out, 2u);

  const Reduction all_rows = fit_screener(ScreenerSpec::kbest(2), d);
  const ReportEntry fixed = cross_validate(d, ScreenerSpec::fixed_subset(all_rows.subset), ClassifierSpec::knn(1), safe);
  EXPECT_DOUBLE_EQ(fixed.mean_accuracy, b.mean_accuracy);
}

TEST(GridSearch, ShapeAndArgmax) {
  Rng rng(3);
  const Dataset d = oracle::random_dataset(rng, 45, 6, 3);
  const std::vector<ScreenerSpec> one{ScreenerSpec::identity()};
  const std::vector<ClassifierSpec> knn1{ClassifierSpec::knn(1)};
  const EvaluationReport single = grid_search(d, one, knn1, {});
  ASSERT_EQ(single.entries.size(), 1u);
  EXPECT_EQ(single.best, 0u);

  const std::vector<ScreenerSpec> screeners{ScreenerSpec::identity(), ScreenerSpec::kbest(2), ScreenerSpec::pca(2),
                                            ScreenerSpec::random(3, 9)};
  const std::vector<ClassifierSpec> ks{ClassifierSpec::knn(1), ClassifierSpec::knn(3), ClassifierSpec::knn(5)};
  const EvaluationReport grid = grid_search(d, screeners, ks, {});
  ASSERT_EQ(grid.entries.size(), 12u);
  EXPECT_EQ(grid.entries[0].screener, "none");
  EXPECT_EQ(grid.entries[2].classifier, "knn(k=5)");
  EXPECT_EQ(grid.entries[3].screener, "kbest(k=2)");
  EXPECT_TRUE(grid.entries[6].transforming);
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.entries.size(); ++i) {
    if (grid.entries[i].mean_accuracy > grid.entries[best].mean_accuracy) best = i;
  }
  EXPECT_EQ(grid.best, best);
  for (const auto& e : grid.entries) {
    EXPECT_GE(e.mean_accuracy, 0.0);
    EXPECT_LE(e.mean_accuracy, 1.0);
  }
  const std::vector<ScreenerSpec> none;
  EXPECT_THROW(grid_search(d, none, ks, {}), ValidationError);
}

Dataset label_copy_data() {
  Rng rng(8);
  const std::size_t n = 50;
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 5) + 1;
  std::vector<double> values;
  std::vector<std::string> names;
  for (std::size_t f = 0; f < 20; ++f) {
    names.push_back("f" + std::to_string(f));
    for (std::size_t i = 0; i < n; ++i) values.push_back(f == 13 ? labels[i] : rng.normal());
  }
  return Dataset(n, std::move(values), std::move(labels), std::move(names));
}

TEST(ConvergenceSweep, RowsPerCount) {
  const Dataset d = label_copy_data();
  const std::vector<ClassifierSpec> knn1{ClassifierSpec::knn(1)};
  const std::vector<std::size_t> counts{1, 5, 20};
  const auto rows = convergence_sweep(d, ScreenerSpec::kbest(1), knn1, counts, {});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_DOUBLE_EQ(rows[0].best_accuracy, 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].n_features_out, counts[i]);
    EXPECT_EQ(rows[i].best_classifier, "knn(k=1)");
    EXPECT_DOUBLE_EQ(rows[i].best_accuracy, rows[i].report.best_entry().mean_accuracy);
  }

  const auto identity = convergence_sweep(d, ScreenerSpec::identity(), knn1, counts, {});
  ASSERT_EQ(identity.size(), 3u);
  EXPECT_DOUBLE_EQ(identity[0].best_accuracy, identity[2].best_accuracy);
}

TEST(FitScreener, RfmsDropsCanaries) {
  const Dataset d = label_copy_data();
  ScreeningConfig config{.alpha = 10, .beta = 5, .forest = {.n_trees = 5, .n_subfeatures = 3}, .n_canaries = 10};
  const Reduction r = fit_screener(ScreenerSpec::rfms_screener(config), d);
  EXPECT_LE(r.subset.size(), 5u);
  for (auto f : r.subset.indices) EXPECT_LT(f, d.n_features());
  EXPECT_EQ(r.apply(d).n_features(), r.subset.size());
}

TEST(ScreenerSpec, Ids) {
  EXPECT_EQ(ScreenerSpec::identity().id(), "none");
  EXPECT_EQ(ScreenerSpec::kbest(7).id(), "kbest(k=7)");
  EXPECT_EQ(ScreenerSpec::pca(3).id(), "pca(components=3)");
  EXPECT_EQ(ScreenerSpec::random(4, 2).id(), "random(k=4,seed=2)");
  EXPECT_EQ(ScreenerSpec::kbest(7).with_count(2).n_out, 2u);
  EXPECT_EQ(ClassifierSpec::majority().id(), "majority");
}

}  // namespace
}  // namespace rfscreen
