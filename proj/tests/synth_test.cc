#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.h"
#include "rfscreen/baselines.h"
#include "rfscreen/error.h"
#include "rfscreen/synth.h"

namespace rfscreen {
namespace {

GeneratorConfig small_config() {
  GeneratorConfig c;
  c.n_classes = 4;
  c.n_samples_per_class = 10;
  c.n_true_features = 3;
  c.n_fake_features = 5;
  c.n_features_out = 25;
  c.seed = 5;
  return c;
}

TEST(Generate, ShapeAndLabels) {
  const GeneratorConfig c = small_config();
  const GeneratedData g = generate(c);
  EXPECT_EQ(g.dataset.n_samples(), 40u);
  EXPECT_EQ(g.dataset.n_features(), 25u);
  EXPECT_EQ(g.dataset.n_classes(), 4);
  EXPECT_EQ(g.dataset.class_counts(), (std::vector<std::size_t>{10, 10, 10, 10}));
  EXPECT_EQ(g.dataset.feature_names()[0], "f_1");
  ASSERT_EQ(g.provenance.outputs.size(), 25u);
  EXPECT_EQ(g.provenance.usefulness.size(), 8u);
  for (std::size_t h = 0; h < 8; ++h) {
    if (g.provenance.is_true_hidden(h)) {
      EXPECT_GE(g.provenance.usefulness[h], c.min_usefulness);
      EXPECT_LE(g.provenance.usefulness[h], c.max_usefulness);
    } else {
      EXPECT_EQ(g.provenance.usefulness[h], 0.0);
    }
  }
  for (const auto& blend : g.provenance.outputs) {
    EXPECT_GE(blend.size(), c.min_count);
    EXPECT_LE(blend.size(), c.max_count);
    std::set<std::size_t> distinct;
    for (const auto& s : blend) {
      EXPECT_LT(s.hidden, 8u);
      EXPECT_GE(std::abs(s.weight), 0.5);
      EXPECT_LE(std::abs(s.weight), 1.5);
      distinct.insert(s.hidden);
    }
    EXPECT_EQ(distinct.size(), blend.size());
  }
}

TEST(Generate, Deterministic) {
  GeneratorConfig c = small_config();
  const GeneratedData a = generate(c);
  EXPECT_EQ(a.dataset, generate(c).dataset);
  c.seed = 6;
  EXPECT_FALSE(a.dataset == generate(c).dataset);
}

TEST(Generate, LinearBlendIsExactWeightedSum) {
  GeneratorConfig c = small_config();
  c.blending_mode = BlendingMode::kLinear;
  c.min_count = c.max_count = 1;
  const GeneratedData lin = generate(c);
  c.blending_mode = BlendingMode::kLogarithmic;
  const GeneratedData log = generate(c);
  for (std::size_t f = 0; f < lin.dataset.n_features(); ++f) {
    for (std::size_t i = 0; i < lin.dataset.n_samples(); ++i) {
      const double s = lin.dataset.value(i, f);
      EXPECT_NEAR(log.dataset.value(i, f), std::copysign(std::log1p(std::abs(s)), s), 1e-12);
    }
  }
}

TEST(Generate, UsefulFeaturesSeparateClasses) {
  GeneratorConfig c;
  c.n_classes = 5;
  c.n_samples_per_class = 30;
  c.n_true_features = 4;
  c.n_fake_features = 0;
  c.min_usefulness = c.max_usefulness = 1.0;
  c.n_features_out = 20;
  const GeneratedData g = generate(c);
  const auto f = anova_fscores(g.dataset);
  std::vector<double> sorted = f;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_GT(sorted[sorted.size() / 2], 5.0);
}

TEST(Generate, FakeOnlyFeaturesLookLikeNoise) {
  GeneratorConfig c;
  c.n_classes = 5;
  c.n_samples_per_class = 20;
  c.n_true_features = 0;
  c.n_fake_features = 50;
  c.n_features_out = 1000;
  const GeneratedData g = generate(c);
  std::vector<double> f = anova_fscores(g.dataset);
  std::nth_element(f.begin(), f.begin() + f.size() / 2, f.end());
  const double median = f[f.size() / 2];
  EXPECT_GE(median, 0.5);
  EXPECT_LE(median, 2.0);
  for (std::size_t o = 0; o < g.provenance.outputs.size(); ++o) EXPECT_FALSE(g.provenance.has_true_source(o));
}

// Outputs sharing a dominant hidden source correlate.
TEST(Generate, CommonSourceCorrelates) {
  GeneratorConfig c;
  c.n_classes = 2;
  c.n_samples_per_class = 200;
  c.n_true_features = 0;
  c.n_fake_features = 1;
  c.min_count = c.max_count = 1;
  c.n_features_out = 2;
  c.blending_mode = BlendingMode::kLinear;
  const GeneratedData g = generate(c);
  const auto a = g.dataset.column(0);
  const auto b = g.dataset.column(1);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  EXPECT_GT(std::abs(sab / std::sqrt(saa * sbb)), 0.5);
}

TEST(TruthOverlap, Examples) {
  Provenance p;
  p.n_true_features = 2;
  p.usefulness = {0.7, 0.9, 0.0};
  p.outputs = {{{0, 1.0}}, {{2, 1.0}}, {{2, 0.6}, {1, -0.8}}, {{2, 1.1}}};
  EXPECT_DOUBLE_EQ(truth_overlap(FeatureSubset{{0, 2}}, p), 1.0);
  EXPECT_DOUBLE_EQ(truth_overlap(FeatureSubset{{1, 3}}, p), 0.0);
  EXPECT_DOUBLE_EQ(truth_overlap(FeatureSubset{{0, 1, 2, 3}}, p), 0.5);
  EXPECT_THROW(truth_overlap(FeatureSubset{{4}}, p), ValidationError);
}

TEST(TruthOverlap, MatchesRecount) {
  const GeneratedData g = generate(small_config());
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + rng.below(25);
    const FeatureSubset subset = random_subset(25, k, rng.next());
    std::size_t hits = 0;
    for (auto o : subset.indices) {
      bool any = false;
      for (const auto& s : g.provenance.outputs[o]) any = any || s.hidden < g.provenance.n_true_features;
      hits += any;
    }
    EXPECT_DOUBLE_EQ(truth_overlap(subset, g.provenance), static_cast<double>(hits) / static_cast<double>(k));
  }
}

TEST(GeneratorConfig, ValidationErrors) {
  const auto rejects = [](auto mutate) {
    GeneratorConfig c = small_config();
    mutate(c);
    EXPECT_THROW(generate(c), ValidationError);
  };
  rejects([](GeneratorConfig& c) { c.n_classes = 0; });
  rejects([](GeneratorConfig& c) { c.n_samples_per_class = 0; });
  rejects([](GeneratorConfig& c) { c.min_usefulness = 0.9; c.max_usefulness = 0.5; });
  rejects([](GeneratorConfig& c) { c.max_usefulness = 1.5; });
  rejects([](GeneratorConfig& c) { c.min_count = 0; });
  rejects([](GeneratorConfig& c) { c.min_count = 5; c.max_count = 3; });
  rejects([](GeneratorConfig& c) { c.max_count = 9; });
  rejects([](GeneratorConfig& c) { c.n_true_features = 0; c.n_fake_features = 0; });
  rejects([](GeneratorConfig& c) { c.n_features_out = 0; });
  EXPECT_EQ(parse_blending_mode("linear"), BlendingMode::kLinear);
  EXPECT_EQ(to_string(parse_blending_mode("logarithmic")), "logarithmic");
  EXPECT_THROW(parse_blending_mode("cubic"), ValidationError);
}

}  // namespace
}  // namespace rfscreen
