#include "catbranch/report.hpp"

#include <nlohmann/json.hpp>
#include <ostream>

#include "catbranch/format.hpp"

namespace catbranch {

const char* to_string(Comparator c) {
  switch (c) {
    case Comparator::kNone: return "";
    case Comparator::kLess: return "<";
    case Comparator::kLessEqual: return "<=";
    case Comparator::kGreater: return ">";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kNone: return "none";
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
  }
  return "?";
}

Verdict evaluate(const MetricRow& row) {
  if (row.comparator == Comparator::kNone || !row.tolerance) return Verdict::kNone;
  const double v = row.value, t = *row.tolerance;
  bool ok = false;
  switch (row.comparator) {
    case Comparator::kLess: ok = v < t; break;
    case Comparator::kLessEqual: ok = v <= t; break;
    case Comparator::kGreater: ok = v > t; break;
    case Comparator::kNone: break;
  }
  return ok ? Verdict::kPass : Verdict::kFail;
}

MetricRow& StudyReport::add(MetricRow row) {
  row.verdict = evaluate(row);
  rows.push_back(std::move(row));
  return rows.back();
}

bool StudyReport::recompute_verdicts() {
  for (auto& r : rows) r.verdict = evaluate(r);
  return passed();
}

bool StudyReport::passed() const {
  for (const auto& r : rows)
    if (r.verdict == Verdict::kFail) return false;
  return true;
}

const MetricRow* StudyReport::find(const std::string& param, const std::string& metric) const {
  for (const auto& r : rows)
    if (r.param == param && r.metric == metric) return &r;
  return nullptr;
}

std::string report_json(const StudyReport& report, bool include_runtime, int indent) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["study"] = report.study;
  ordered_json settings = ordered_json::object();
  for (const auto& [k, v] : report.settings) settings[k] = v;
  j["settings"] = settings;
  j["sweep"] = report.sweep;
  ordered_json seeds = ordered_json::object();
  for (const auto& [k, v] : report.seeds) seeds[k] = v;
  j["seeds"] = seeds;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json o;
    o["param"] = r.param;
    o["metric"] = r.metric;
    o["value"] = r.value;
    o["stderr"] = r.stderr_value ? ordered_json(*r.stderr_value) : ordered_json(nullptr);
    o["tolerance"] = r.tolerance ? ordered_json(*r.tolerance) : ordered_json(nullptr);
    o["comparator"] = to_string(r.comparator);
    o["verdict"] = to_string(r.verdict);
    if (!r.note.empty()) o["note"] = r.note;
    rows.push_back(std::move(o));
  }
  j["metrics"] = rows;
  j["passed"] = report.passed();
  if (include_runtime) j["runtime_seconds"] = report.runtime_seconds;
  return j.dump(indent);
}

void write_report_csv(std::ostream& os, const StudyReport& report) {
  os << "study,param,metric,value,stderr,tolerance,comparator,verdict\n";
  for (const auto& r : report.rows) {
    os << report.study << ',' << r.param << ',' << r.metric << ',' << format_double(r.value) << ','
       << (r.stderr_value ? format_double(*r.stderr_value) : "") << ','
       << (r.tolerance ? format_double(*r.tolerance) : "") << ',' << to_string(r.comparator) << ','
       << to_string(r.verdict) << '\n';
  }
}

}  // namespace catbranch
