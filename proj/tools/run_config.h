#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace rfscreen::cli {

// Flat `key = value` settings. '#' starts a comment; blank lines are ignored.
// Keys use the hyphenated hyperparameter names (step-size, reduced-size, ...).
class RunConfig {
 public:
  RunConfig() = default;

  // Throws ValidationError on syntax errors, repeated keys, or keys outside
  // `allowed` (the message names the offending key and line).
  static RunConfig parse(std::istream& in, const std::set<std::string>& allowed,
                         const std::string& source = "<config>");
  static RunConfig load(const std::filesystem::path& path, const std::set<std::string>& allowed);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  // Comma-separated list of nonnegative integers.
  std::vector<std::size_t> get_size_list(const std::string& key, std::vector<std::size_t> fallback) const;
  std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace rfscreen::cli
