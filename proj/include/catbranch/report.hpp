#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace catbranch {

enum class Comparator { kNone, kLess, kLessEqual, kGreater };
enum class Verdict { kNone, kPass, kFail };

const char* to_string(Comparator c);
const char* to_string(Verdict v);

/// One metric; rows with a comparator carry a verdict that is a pure function of value and tolerance.
struct MetricRow {
  std::string param;   // sweep point, e.g. "n=100" or "a_n=64"
  std::string metric;  // e.g. "ks_x_median"
  double value = 0.0;
  std::optional<double> stderr_value;
  std::optional<double> tolerance;
  Comparator comparator = Comparator::kNone;
  Verdict verdict = Verdict::kNone;
  std::string note;
};

Verdict evaluate(const MetricRow& row);

struct StudyReport {
  std::string study;
  std::vector<std::pair<std::string, std::string>> settings;  // effective study settings
  std::vector<std::string> sweep;                              // parameter sweep values
  std::vector<MetricRow> rows;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  double runtime_seconds = 0.0;

  /// Adds a row and fixes its verdict from value and tolerance.
  MetricRow& add(MetricRow row);
  /// Recomputes every verdict; returns true when no row fails.
  bool recompute_verdicts();
  bool passed() const;
  const MetricRow* find(const std::string& param, const std::string& metric) const;
};

/// JSON document; runtime is included only when include_runtime is set.
std::string report_json(const StudyReport& report, bool include_runtime, int indent = 2);
/// Flat CSV: study,param,metric,value,stderr,tolerance,comparator,verdict.
void write_report_csv(std::ostream& os, const StudyReport& report);

}  // namespace catbranch
