#include "run_config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "rfscreen/error.h"

namespace rfscreen::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ValidationError("config key '" + key + "': invalid value '" + text + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ValidationError("config key '" + key + "': value must be finite");
  }
  return value;
}

// Accepts digit-group underscores, e.g. 20_230_125.
std::string strip_underscores(std::string text) {
  std::erase(text, '_');
  return text;
}

}  // namespace

RunConfig RunConfig::parse(std::istream& in, const std::set<std::string>& allowed, const std::string& source) {
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError(source + ":" + std::to_string(line_no) + ": empty key");
    if (!allowed.count(key)) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (config.values_.count(key)) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": key '" + key + "' given twice");
    }
    config.values_[key] = value;
  }
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path, const std::set<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse(in, allowed, path.string());
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<std::size_t>(key, strip_underscores(it->second));
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<std::uint64_t>(key, strip_underscores(it->second));
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<double>(key, it->second);
}

std::vector<std::size_t> RunConfig::get_size_list(const std::string& key,
                                                  std::vector<std::size_t> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::size_t> out;
  for (const auto& item : split_list(it->second)) out.push_back(parse_number<std::size_t>(key, strip_underscores(item)));
  return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& key, std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) out.push_back(parse_number<double>(key, item));
  return out;
}

}  // namespace rfscreen::cli
