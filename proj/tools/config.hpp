#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace catbranch::cli {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Strict sectioned key-value configuration. Keys outside the schema are rejected at parse time.
/// Getters record the effective value they return, so the output header can echo it.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text, const std::string& origin = "<config>");
  static RunConfig load(const std::string& path);

  /// Section "" holds top-level keys (seed).
  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback);
  double get_double(const std::string& section, const std::string& key, double fallback);
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback);
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& section, const std::string& key, bool fallback);
  std::vector<double> get_doubles(const std::string& section, const std::string& key, std::vector<double> fallback);
  std::vector<std::int64_t> get_ints(const std::string& section, const std::string& key,
                                     std::vector<std::int64_t> fallback);

  /// Effective values read so far, as "section.key" -> value, in key order.
  const std::map<std::string, std::string>& effective() const { return effective_; }
  const std::string& source_bytes() const { return bytes_; }

 private:
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;
  void record(const std::string& section, const std::string& key, const std::string& value);

  std::map<std::pair<std::string, std::string>, std::string> values_;
  std::map<std::string, std::string> effective_;
  std::string bytes_;
};

/// Schema: section -> allowed keys.
const std::map<std::string, std::set<std::string>>& config_schema();

/// Human-readable schema listing for usage errors.
std::string schema_help();

}  // namespace catbranch::cli
