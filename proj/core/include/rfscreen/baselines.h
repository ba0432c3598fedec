#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rfscreen/dataset.h"

namespace rfscreen {

// One-way ANOVA F statistic per feature: between-class mean square over
// within-class mean square, with k - 1 and N - k degrees of freedom. A
// constant feature scores 0; zero within-class spread with nonzero between
// spread scores +infinity.
std::vector<double> anova_fscores(const Dataset& dataset);

// Top k_out features by F score, ties by smaller index.
FeatureSubset kbest_fscore(const Dataset& dataset, std::size_t k_out);

struct PcaModel {
  std::vector<double> mean;        // length n_features
  std::vector<double> components;  // column-major n_features x n_components, orthonormal
  std::vector<double> eigenvalues; // descending
  std::size_t n_features = 0;
  std::size_t n_components = 0;

  double component(std::size_t feature, std::size_t k) const {
    return components[k * n_features + feature];
  }
};

// Eigendecomposition of the sample covariance (divisor N - 1, or N when N == 1).
// Eigenvector signs are fixed so the largest-magnitude entry is positive.
PcaModel pca_fit(const Dataset& dataset, std::size_t n_components);

// Row-major N x n_components projection (X - mean) * components. `features`
// holds row-major samples of model.n_features values each.
std::vector<double> pca_transform(const PcaModel& model, std::span<const double> features);

// Projects a dataset and returns a new one whose columns are the components,
// named pc_1, pc_2, ...; labels are carried over.
Dataset pca_transform(const PcaModel& model, const Dataset& dataset);

// Row-major N x n_features reconstruction mean + scores * components^T.
std::vector<double> pca_inverse_transform(const PcaModel& model, std::span<const double> scores);

// Uniform sample of k_out distinct features, deterministic per seed.
FeatureSubset random_subset(std::size_t n_features, std::size_t k_out, std::uint64_t seed);

}  // namespace rfscreen
