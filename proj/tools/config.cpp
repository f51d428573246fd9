#include "config.hpp"

#include <fstream>
#include <sstream>

#include "catbranch/format.hpp"

namespace catbranch::cli {

const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"", {"seed"}},
      {"model",
       {"n", "lambda1", "lambda2", "pmf1", "pmf2", "x0", "y0", "a_n", "c1", "c2", "alpha1", "alpha2",
        "require_subcritical"}},
      {"sim",
       {"horizon", "dt", "grid", "reps", "burn_in", "gap", "count", "zero_noise", "event_log", "table_lo", "table_hi",
        "table_points"}},
      {"study",
       {"n_list", "a_n_list", "t_probe", "ks_tolerance", "repeats", "regime", "bp_n", "epsilon", "moment_se_multiple",
        "degenerate_row"}},
      {"io", {"out", "format"}},
  };
  return schema;
}

std::string schema_help() {
  std::ostringstream os;
  os << "config schema (key = value, '#' comments, [section] headers):\n";
  for (const auto& [section, keys] : config_schema()) {
    os << "  " << (section.empty() ? "(top level)" : "[" + section + "]") << ':';
    for (const auto& k : keys) os << ' ' << k;
    os << '\n';
  }
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& origin, std::size_t line) { return origin + ":" + std::to_string(line) + ": "; }

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  cfg.bytes_ = text;
  const auto& schema = config_schema();
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where(origin, lineno) + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty() || !schema.count(section))
        throw ConfigError(where(origin, lineno) + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where(origin, lineno) + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!schema.at(section).count(key))
      throw ConfigError(where(origin, lineno) + "unknown key '" + key + "'" +
                        (section.empty() ? " at top level" : " in [" + section + "]"));
    if (cfg.values_.count({section, key})) throw ConfigError(where(origin, lineno) + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where(origin, lineno) + "empty value for '" + key + "'");
    cfg.values_[{section, key}] = value;
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  return values_.count({section, key}) > 0;
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  const auto& schema = config_schema();
  if (!schema.count(section) || !schema.at(section).count(key))
    throw ConfigError("unknown config key '" + section + "." + key + "'");
  values_[{section, key}] = value;
}

std::optional<std::string> RunConfig::raw(const std::string& section, const std::string& key) const {
  const auto& schema = config_schema();
  if (!schema.count(section) || !schema.at(section).count(key))
    throw ConfigError("unknown config key '" + section + "." + key + "'");
  const auto it = values_.find({section, key});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void RunConfig::record(const std::string& section, const std::string& key, const std::string& value) {
  effective_[section.empty() ? key : section + "." + key] = value;
}

namespace {

template <class F>
auto convert(const std::string& section, const std::string& key, const std::string& v, F&& f) {
  try {
    return f(v);
  } catch (const std::exception& e) {
    throw ConfigError("config key '" + (section.empty() ? key : section + "." + key) + "': " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

std::string RunConfig::get_string(const std::string& section, const std::string& key, const std::string& fallback) {
  const std::string v = raw(section, key).value_or(fallback);
  record(section, key, v);
  return v;
}

double RunConfig::get_double(const std::string& section, const std::string& key, double fallback) {
  const auto r = raw(section, key);
  const double v = r ? convert(section, key, *r, [](const std::string& s) { return parse_double(s, "number"); }) : fallback;
  record(section, key, format_double(v));
  return v;
}

std::int64_t RunConfig::get_int(const std::string& section, const std::string& key, std::int64_t fallback) {
  const auto r = raw(section, key);
  const std::int64_t v = r ? convert(section, key, *r, [](const std::string& s) { return parse_int(s, "integer"); }) : fallback;
  record(section, key, std::to_string(v));
  return v;
}

std::uint64_t RunConfig::get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) {
  const auto r = raw(section, key);
  const std::uint64_t v = r ? convert(section, key, *r, [](const std::string& s) { return parse_u64(s, "unsigned integer"); }) : fallback;
  record(section, key, std::to_string(v));
  return v;
}

bool RunConfig::get_bool(const std::string& section, const std::string& key, bool fallback) {
  const auto r = raw(section, key);
  bool v = fallback;
  if (r) {
    if (*r == "true" || *r == "1") v = true;
    else if (*r == "false" || *r == "0") v = false;
    else throw ConfigError("config key '" + section + "." + key + "': expected true or false, got '" + *r + "'");
  }
  record(section, key, v ? "true" : "false");
  return v;
}

std::vector<double> RunConfig::get_doubles(const std::string& section, const std::string& key,
                                           std::vector<double> fallback) {
  const auto r = raw(section, key);
  std::vector<double> v = std::move(fallback);
  if (r) {
    v.clear();
    for (const auto& item : split_list(*r))
      v.push_back(convert(section, key, item, [](const std::string& s) { return parse_double(s, "number"); }));
  }
  std::string echo;
  for (std::size_t i = 0; i < v.size(); ++i) echo += (i ? "," : "") + format_double(v[i]);
  record(section, key, echo);
  return v;
}

std::vector<std::int64_t> RunConfig::get_ints(const std::string& section, const std::string& key,
                                              std::vector<std::int64_t> fallback) {
  const auto r = raw(section, key);
  std::vector<std::int64_t> v = std::move(fallback);
  if (r) {
    v.clear();
    for (const auto& item : split_list(*r))
      v.push_back(convert(section, key, item, [](const std::string& s) { return parse_int(s, "integer"); }));
  }
  std::string echo;
  for (std::size_t i = 0; i < v.size(); ++i) echo += (i ? "," : "") + std::to_string(v[i]);
  record(section, key, echo);
  return v;
}

}  // namespace catbranch::cli
