#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rfscreen {

// Dense numeric feature matrix with integer class labels.
//
// Values are stored column-major: column(f) is a contiguous span of
// n_samples() values. Class ids are 1-based; n_classes() is fixed at
// construction so that row subsets keep count vectors of the same length as
// their parent even if a class is absent from the subset.
//
// A Dataset is immutable once constructed.
class Dataset {
 public:
  Dataset() = default;

  // Throws ValidationError if shapes disagree, a value is not finite, a label
  // is outside [1, n_classes], or feature names repeat. n_classes == 0 means
  // "use the largest label".
  Dataset(std::size_t n_samples, std::vector<double> column_major_values, std::vector<int> labels,
          std::vector<std::string> feature_names, int n_classes = 0);

  std::size_t n_samples() const { return labels_.size(); }
  std::size_t n_features() const { return names_.size(); }
  int n_classes() const { return n_classes_; }

  std::span<const double> column(std::size_t feature) const {
    return {values_.data() + feature * n_samples(), n_samples()};
  }
  double value(std::size_t sample, std::size_t feature) const {
    return values_[feature * n_samples() + sample];
  }
  int label(std::size_t sample) const { return labels_[sample]; }
  std::span<const int> labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  std::span<const double> values() const { return values_; }

  std::vector<double> row(std::size_t sample) const;

  // Number of samples per class, indexed by class id - 1.
  std::vector<std::size_t> class_counts() const;

  // Number of classes that actually occur.
  int distinct_classes() const;

  Dataset select_rows(std::span<const std::size_t> rows) const;
  Dataset select_columns(std::span<const std::size_t> features) const;

  // Returns a copy with `extra` appended after the existing columns. `extra` is
  // column-major with n_samples() values per new column.
  Dataset with_appended_columns(std::span<const double> extra,
                                std::vector<std::string> extra_names) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<double> values_;
  std::vector<int> labels_;
  std::vector<std::string> names_;
  int n_classes_ = 0;
};

// Ordered list of distinct feature positions (0-based). Order carries meaning:
// screeners emit features in descending importance.
struct FeatureSubset {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }

  // Throws ValidationError on out-of-range or repeated entries.
  void validate(std::size_t n_features) const;

  friend bool operator==(const FeatureSubset&, const FeatureSubset&) = default;
};

// Parses CSV text with a header row. Source labels are remapped to 1..k in
// order of first occurrence. Errors carry 1-based data row numbers (the header
// is row 0) and the column name.
Dataset read_csv(std::istream& in, const std::string& label_column = "label",
                 const std::string& source_name = "<stream>");
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column = "label");

// Writes the label column first, then the features, using shortest
// round-tripping decimal representations.
void write_csv(std::ostream& out, const Dataset& dataset, const std::string& label_column = "label");
void write_csv(const std::filesystem::path& path, const Dataset& dataset,
               const std::string& label_column = "label");

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified k-fold split. Each class's samples are shuffled with a seeded
// stream and dealt round-robin over the folds, continuing where the previous
// class stopped, so per-class and overall fold sizes differ by at most one.
// Index lists are sorted ascending.
std::vector<Fold> stratified_kfold(const Dataset& dataset, std::size_t folds, std::uint64_t seed);

}  // namespace rfscreen
