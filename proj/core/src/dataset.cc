#include "rfscreen/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rfscreen/error.h"
#include "rfscreen/rng.h"

namespace rfscreen {

Dataset::Dataset(std::size_t n_samples, std::vector<double> column_major_values,
                 std::vector<int> labels, std::vector<std::string> feature_names, int n_classes)
    : values_(std::move(column_major_values)),
      labels_(std::move(labels)),
      names_(std::move(feature_names)),
      n_classes_(n_classes) {
  if (labels_.size() != n_samples) {
    throw ValidationError("dataset: label count " + std::to_string(labels_.size()) +
                          " does not match sample count " + std::to_string(n_samples));
  }
  if (values_.size() != n_samples * names_.size()) {
    throw ValidationError("dataset: value count does not match samples x features");
  }
  if (n_classes_ == 0 && !labels_.empty()) {
    n_classes_ = *std::max_element(labels_.begin(), labels_.end());
  }
  for (int y : labels_) {
    if (y < 1 || y > n_classes_) {
      throw ValidationError("dataset: label " + std::to_string(y) + " outside [1, " +
                            std::to_string(n_classes_) + "]");
    }
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("dataset: non-finite value at row " + std::to_string(i % n_samples + 1) +
                            ", column " + names_[i / n_samples]);
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) {
      throw ValidationError("dataset: duplicate feature name '" + name + "'");
    }
  }
}

std::vector<double> Dataset::row(std::size_t sample) const {
  std::vector<double> out(n_features());
  for (std::size_t f = 0; f < n_features(); ++f) out[f] = value(sample, f);
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes_), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y - 1)];
  return counts;
}

int Dataset::distinct_classes() const {
  const auto counts = class_counts();
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  const std::size_t n = n_samples();
  std::vector<double> values(rows.size() * n_features());
  std::vector<int> labels(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n) throw ValidationError("select_rows: row index out of range");
    labels[r] = labels_[rows[r]];
  }
  for (std::size_t f = 0; f < n_features(); ++f) {
    const double* src = values_.data() + f * n;
    double* dst = values.data() + f * rows.size();
    for (std::size_t r = 0; r < rows.size(); ++r) dst[r] = src[rows[r]];
  }
  return Dataset(rows.size(), std::move(values), std::move(labels), names_, n_classes_);
}

Dataset Dataset::select_columns(std::span<const std::size_t> features) const {
  const std::size_t n = n_samples();
  std::vector<double> values;
  values.reserve(features.size() * n);
  std::vector<std::string> names;
  names.reserve(features.size());
  for (std::size_t f : features) {
    if (f >= n_features()) throw ValidationError("select_columns: feature index out of range");
    auto col = column(f);
    values.insert(values.end(), col.begin(), col.end());
    names.push_back(names_[f]);
  }
  return Dataset(n, std::move(values), labels_, std::move(names), n_classes_);
}

Dataset Dataset::with_appended_columns(std::span<const double> extra,
                                       std::vector<std::string> extra_names) const {
  if (extra.size() != extra_names.size() * n_samples()) {
    throw ValidationError("with_appended_columns: value count does not match column count");
  }
  std::vector<double> values = values_;
  values.insert(values.end(), extra.begin(), extra.end());
  std::vector<std::string> names = names_;
  names.insert(names.end(), std::make_move_iterator(extra_names.begin()),
               std::make_move_iterator(extra_names.end()));
  return Dataset(n_samples(), std::move(values), labels_, std::move(names), n_classes_);
}

void FeatureSubset::validate(std::size_t n_features) const {
  std::vector<bool> seen(n_features, false);
  for (std::size_t idx : indices) {
    if (idx >= n_features) {
      throw ValidationError("feature subset: index " + std::to_string(idx + 1) +
                            " exceeds feature count " + std::to_string(n_features));
    }
    if (seen[idx]) {
      throw ValidationError("feature subset: duplicate index " + std::to_string(idx + 1));
    }
    seen[idx] = true;
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV record. Double quotes may wrap a field; "" inside quotes is a
// literal quote. Embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line, std::size_t row,
                                      const std::string& source) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && trim(cur).empty()) {
      quoted = true;
      was_quoted = true;
      cur.clear();
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) {
    throw ValidationError(source + ": unterminated quote at row " + std::to_string(row));
  }
  fields.push_back(was_quoted ? cur : std::string(trim(cur)));
  return fields;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& label_column, const std::string& source_name) {
  std::string line;
  if (!read_line(in, line) || trim(line).empty()) {
    throw ValidationError(source_name + ": empty file (no header row)");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_record(line, 0, source_name);
  std::size_t label_pos = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == label_column) {
      label_pos = c;
      break;
    }
  }
  if (label_pos == header.size()) {
    throw ValidationError(source_name + ": label column '" + label_column + "' not found in header");
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_pos) names.push_back(header[c]);
  }

  std::vector<std::vector<double>> columns(names.size());
  std::vector<int> labels;
  std::unordered_map<std::string, int> label_ids;
  std::size_t row = 0;
  while (read_line(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_record(line, row, source_name);
    if (fields.size() != header.size()) {
      throw ValidationError(source_name + ": row " + std::to_string(row) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
    }
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_pos) {
        auto [it, inserted] = label_ids.try_emplace(fields[c], static_cast<int>(label_ids.size()) + 1);
        labels.push_back(it->second);
        continue;
      }
      const std::string& cell = fields[c];
      double v = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (first != last && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (cell.empty() || ec != std::errc() || ptr != last) {
        throw ValidationError(source_name + ": non-numeric value '" + cell + "' at row " +
                              std::to_string(row) + ", column " + header[c]);
      }
      if (!std::isfinite(v)) {
        throw ValidationError(source_name + ": NaN or infinite value at row " + std::to_string(row) +
                              ", column " + header[c]);
      }
      columns[out_col++].push_back(v);
    }
  }
  if (row == 0) throw ValidationError(source_name + ": empty file (no data rows)");

  std::vector<double> values;
  values.reserve(row * names.size());
  for (auto& col : columns) values.insert(values.end(), col.begin(), col.end());
  return Dataset(row, std::move(values), std::move(labels), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_csv(in, label_column, path.string());
}

void write_csv(std::ostream& out, const Dataset& dataset, const std::string& label_column) {
  out << quote_if_needed(label_column);
  for (const auto& name : dataset.feature_names()) out << ',' << quote_if_needed(name);
  out << '\n';
  for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
    out << dataset.label(i);
    for (std::size_t f = 0; f < dataset.n_features(); ++f) {
      out << ',' << format_double(dataset.value(i, f));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& dataset, const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(out, dataset, label_column);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<Fold> stratified_kfold(const Dataset& dataset, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("stratified_kfold: folds must be >= 2");
  const auto counts = dataset.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0 && counts[c] < folds) {
      throw ValidationError("stratified_kfold: class " + std::to_string(c + 1) + " has " +
                            std::to_string(counts[c]) + " samples, fewer than " +
                            std::to_string(folds) + " folds");
    }
  }
  std::vector<std::vector<std::size_t>> by_class(counts.size());
  for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
    by_class[static_cast<std::size_t>(dataset.label(i) - 1)].push_back(i);
  }
  std::vector<std::size_t> fold_of(dataset.n_samples());
  std::size_t next = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    Rng rng(stream_seed(seed, streams::kFold, c));
    rng.shuffle(by_class[c]);
    for (std::size_t s : by_class[c]) {
      fold_of[s] = next;
      next = (next + 1) % folds;
    }
  }
  std::vector<Fold> out(folds);
  for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
    for (std::size_t f = 0; f < folds; ++f) {
      (fold_of[i] == f ? out[f].test : out[f].train).push_back(i);
    }
  }
  return out;
}

}  // namespace rfscreen
