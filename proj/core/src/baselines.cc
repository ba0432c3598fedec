#include "rfscreen/baselines.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rfscreen/error.h"
#include "rfscreen/rng.h"

namespace rfscreen {

std::vector<double> anova_fscores(const Dataset& dataset) {
  const int k = dataset.distinct_classes();
  if (k < 2) throw ValidationError("k-best: dataset needs at least two classes");
  const std::size_t n = dataset.n_samples();
  if (n <= static_cast<std::size_t>(k)) {
    throw ValidationError("k-best: need more samples than classes for within-class variance");
  }
  const auto counts = dataset.class_counts();
  const auto n_cls = counts.size();
  const double df_between = static_cast<double>(k - 1);
  const double df_within = static_cast<double>(n - static_cast<std::size_t>(k));

  std::vector<double> scores(dataset.n_features());
  std::vector<double> sums(n_cls);
  for (std::size_t f = 0; f < dataset.n_features(); ++f) {
    const auto col = dataset.column(f);
    std::fill(sums.begin(), sums.end(), 0.0);
    double total = 0.0;
    double raw_sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sums[static_cast<std::size_t>(dataset.label(i) - 1)] += col[i];
      total += col[i];
      raw_sumsq += col[i] * col[i];
    }
    const double grand = total / static_cast<double>(n);
    double ss_between = 0.0;
    for (std::size_t c = 0; c < n_cls; ++c) {
      if (counts[c] == 0) continue;
      const double d = sums[c] / static_cast<double>(counts[c]) - grand;
      ss_between += static_cast<double>(counts[c]) * d * d;
    }
    double ss_within = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(dataset.label(i) - 1);
      const double d = col[i] - sums[c] / static_cast<double>(counts[c]);
      ss_within += d * d;
    }
    // Relative cutoffs absorb rounding in the class means.
    const bool no_between = ss_between <= 1e-24 * raw_sumsq;
    const bool no_within = ss_within <= 1e-24 * raw_sumsq;
    if (no_between) {
      scores[f] = 0.0;
    } else if (no_within) {
      scores[f] = std::numeric_limits<double>::infinity();
    } else {
      scores[f] = (ss_between / df_between) / (ss_within / df_within);
    }
  }
  return scores;
}

FeatureSubset kbest_fscore(const Dataset& dataset, std::size_t k_out) {
  if (k_out == 0 || k_out > dataset.n_features()) {
    throw ValidationError("k-best: requested " + std::to_string(k_out) + " of " +
                          std::to_string(dataset.n_features()) + " features");
  }
  const auto scores = anova_fscores(dataset);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(k_out);
  return FeatureSubset{std::move(order)};
}

PcaModel pca_fit(const Dataset& dataset, std::size_t n_components) {
  const std::size_t n = dataset.n_samples();
  const std::size_t p = dataset.n_features();
  if (n_components == 0 || n_components > std::min(n, p)) {
    throw ValidationError("pca: n_components " + std::to_string(n_components) +
                          " must lie in [1, min(samples, features)] = [1, " +
                          std::to_string(std::min(n, p)) + "]");
  }
  const auto values = dataset.values();
  Eigen::Map<const Eigen::MatrixXd> x(values.data(), static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(p));
  const Eigen::VectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  const double divisor = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / divisor;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw ValidationError("pca: eigendecomposition failed");

  PcaModel model;
  model.n_features = p;
  model.n_components = n_components;
  model.mean.assign(mean.data(), mean.data() + p);
  model.components.resize(p * n_components);
  model.eigenvalues.resize(n_components);
  // Eigen returns ascending eigenvalues.
  for (std::size_t k = 0; k < n_components; ++k) {
    const auto src = static_cast<Eigen::Index>(p - 1 - k);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0) v = -v;
    std::copy(v.data(), v.data() + p, model.components.begin() + static_cast<std::ptrdiff_t>(k * p));
    model.eigenvalues[k] = std::max(0.0, solver.eigenvalues()(src));
  }
  return model;
}

std::vector<double> pca_transform(const PcaModel& model, std::span<const double> features) {
  const std::size_t p = model.n_features;
  if (p == 0 || features.size() % p != 0) {
    throw ValidationError("pca_transform: input width does not match model feature count " +
                          std::to_string(p));
  }
  const std::size_t n = features.size() / p;
  std::vector<double> out(n * model.n_components, 0.0);
  std::vector<double> centered(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < p; ++f) centered[f] = features[i * p + f] - model.mean[f];
    for (std::size_t k = 0; k < model.n_components; ++k) {
      double acc = 0.0;
      for (std::size_t f = 0; f < p; ++f) acc += centered[f] * model.component(f, k);
      out[i * model.n_components + k] = acc;
    }
  }
  return out;
}

Dataset pca_transform(const PcaModel& model, const Dataset& dataset) {
  if (dataset.n_features() != model.n_features) {
    throw ValidationError("pca_transform: dataset has " + std::to_string(dataset.n_features()) +
                          " features, model expects " + std::to_string(model.n_features));
  }
  const std::size_t n = dataset.n_samples();
  std::vector<double> rows(n * model.n_features);
  for (std::size_t f = 0; f < model.n_features; ++f) {
    const auto col = dataset.column(f);
    for (std::size_t i = 0; i < n; ++i) rows[i * model.n_features + f] = col[i];
  }
  const auto scores = pca_transform(model, rows);
  std::vector<double> column_major(n * model.n_components);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < model.n_components; ++k) {
      column_major[k * n + i] = scores[i * model.n_components + k];
    }
  }
  std::vector<std::string> names;
  for (std::size_t k = 0; k < model.n_components; ++k) names.push_back("pc_" + std::to_string(k + 1));
  std::vector<int> labels(dataset.labels().begin(), dataset.labels().end());
  return Dataset(n, std::move(column_major), std::move(labels), std::move(names), dataset.n_classes());
}

std::vector<double> pca_inverse_transform(const PcaModel& model, std::span<const double> scores) {
  const std::size_t q = model.n_components;
  if (q == 0 || scores.size() % q != 0) {
    throw ValidationError("pca_inverse_transform: input width does not match component count");
  }
  const std::size_t n = scores.size() / q;
  const std::size_t p = model.n_features;
  std::vector<double> out(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < p; ++f) {
      double acc = model.mean[f];
      for (std::size_t k = 0; k < q; ++k) acc += scores[i * q + k] * model.component(f, k);
      out[i * p + f] = acc;
    }
  }
  return out;
}

FeatureSubset random_subset(std::size_t n_features, std::size_t k_out, std::uint64_t seed) {
  if (k_out > n_features) {
    throw ValidationError("random subset: requested " + std::to_string(k_out) + " of " +
                          std::to_string(n_features) + " features");
  }
  std::vector<std::size_t> ids(n_features);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(stream_seed(seed, streams::kSubset, 0));
  rng.partial_shuffle(ids, k_out);
  ids.resize(k_out);
  return FeatureSubset{std::move(ids)};
}

}  // namespace rfscreen
