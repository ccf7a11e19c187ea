#ifndef STABKIT_CONFIG_HPP
#define STABKIT_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stabkit/core.hpp"
#include "stabkit/io.hpp"

namespace stabkit {

class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Flat `key = value` configuration. Lines starting with `#` and trailing
/// `# ...` comments are ignored; later assignments replace earlier ones.
/// Every lookup marks its key as used so that leftovers can be rejected.
class Config {
 public:
  static Config parse(const std::string& text) {
    Config c;
    std::size_t lineno = 0;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = io::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
      c.set(io::trim(line.substr(0, eq)), io::trim(line.substr(eq + 1)));
    }
    return c;
  }

  /// Applies a `key=value` override as given on a command line.
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    set(io::trim(assignment.substr(0, eq)), io::trim(assignment.substr(eq + 1)));
  }

  void set(const std::string& key, const std::string& value) {
    if (key.empty()) throw ConfigError("config key must be nonempty");
    if (value.empty()) throw ConfigError("config key '" + key + "' has an empty value");
    values_[key] = value;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  std::string text_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  double number(const std::string& key) const {
    try {
      return io::parse_double(text(key));
    } catch (const ParameterError&) {
      throw ConfigError("config key '" + key + "' must be a number, got '" + values_.at(key) + "'");
    }
  }

  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::size_t count(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9)
      throw ConfigError("config key '" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  std::size_t count_or(const std::string& key, std::size_t fallback) const { return has(key) ? count(key) : fallback; }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& cell : io::split(text(key), ',')) {
      try {
        out.push_back(io::parse_double(cell));
      } catch (const ParameterError&) {
        throw ConfigError("config key '" + key + "' must be a comma-separated list of numbers");
      }
    }
    return out;
  }

  /// Keys `prefix<suffix>` with their suffixes, in key order.
  std::vector<std::string> suffixes(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0) out.push_back(k.substr(prefix.size()));
    return out;
  }

  /// Throws listing every key that no lookup has touched.
  void reject_unused() const {
    std::string bad;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) bad += (bad.empty() ? "" : ", ") + k;
    if (!bad.empty()) throw ConfigError("unknown or unused config keys: " + bad);
  }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace stabkit

#endif  // STABKIT_CONFIG_HPP
