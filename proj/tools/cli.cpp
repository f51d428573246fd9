#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <variant>

#include "catbranch/bp_sim.hpp"
#include "catbranch/format.hpp"
#include "catbranch/parallel.hpp"
#include "catbranch/params.hpp"
#include "catbranch/report.hpp"
#include "catbranch/sde_sim.hpp"
#include "catbranch/simd/kernels.hpp"
#include "catbranch/stationary.hpp"
#include "catbranch/studies.hpp"
#include "config.hpp"

namespace catbranch::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;
  bool bare = false;  // CSV without a column header line
};

struct Outcome {
  std::optional<Table> table;
  std::vector<StudyReport> reports;
  int exit_code = kExitOk;
};

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> reps;
  std::string out;
  std::string format;
  std::size_t threads = 0;
  bool no_timestamp = false;
  std::string isa = "auto";
};

constexpr const char* kDefaultPmf = "0:0.3,1:0.45,2:0.25";

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? ordered_json(*d) : ordered_json(format_double(*d));
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

// ---- model sections ----

OffspringPmf read_pmf(RunConfig& c, const char* key) {
  const std::string text = c.get_string("model", key, kDefaultPmf);
  try {
    return parse_pmf(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model.") + key + ": " + e.what());
  }
}

BranchingParams read_branching(RunConfig& c, double x0_default = 1.0, double y0_default = 1.0) {
  BranchingParams bp;
  bp.n = c.get_int("model", "n", 20);
  if (bp.n < 1) throw ConfigError("model.n must be >= 1");
  bp.lambda1 = c.get_double("model", "lambda1", 1.0);
  bp.lambda2 = c.get_double("model", "lambda2", 1.0);
  bp.pmf1 = read_pmf(c, "pmf1");
  bp.pmf2 = read_pmf(c, "pmf2");
  bp.x0_count = lattice_count(c.get_double("model", "x0", x0_default), bp.n, "x0");
  bp.y0_count = lattice_count(c.get_double("model", "y0", y0_default), bp.n, "y0");
  bp.a_n = c.get_double("model", "a_n", 1.0);
  return bp;
}

/// Limit constants: explicit c/alpha keys win, otherwise they follow from the pmfs at scale n.
DiffusionParams read_diffusion(RunConfig& c, double x0_default = 1.0, double y0_default = 1.0) {
  const auto n = static_cast<double>(c.get_int("model", "n", 20));
  const auto m1 = offspring_moments(read_pmf(c, "pmf1"));
  const auto m2 = offspring_moments(read_pmf(c, "pmf2"));
  DiffusionParams d;
  d.c1 = c.get_double("model", "c1", n * (m1.mean - 1.0));
  d.c2 = c.get_double("model", "c2", n * (m2.mean - 1.0));
  d.alpha1 = c.get_double("model", "alpha1", m1.spread);
  d.alpha2 = c.get_double("model", "alpha2", m2.spread);
  d.lambda1 = c.get_double("model", "lambda1", 1.0);
  d.lambda2 = c.get_double("model", "lambda2", 1.0);
  d.x0 = c.get_double("model", "x0", x0_default);
  d.y0 = c.get_double("model", "y0", y0_default);
  d.a_n = c.get_double("model", "a_n", 1.0);
  return d;
}

std::vector<double> output_grid(double horizon, double step) {
  if (!(step > 0.0)) throw ConfigError("sim.grid must be positive");
  std::vector<double> g;
  const auto count = static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) g.push_back(std::min(horizon, static_cast<double>(i) * step));
  return g;
}

std::size_t read_reps(RunConfig& c, std::int64_t fallback) {
  const auto reps = c.get_int("sim", "reps", fallback);
  if (reps < 1) throw ConfigError("sim.reps must be >= 1");
  return static_cast<std::size_t>(reps);
}

// ---- commands ----

Outcome cmd_params_check(RunConfig& c, std::ostream& err) {
  const BranchingParams bp = read_branching(c);
  const bool sub = c.get_bool("model", "require_subcritical", false);
  const ValidationReport r = validate(bp, sub);
  Outcome o;
  Table t;
  t.columns = {"check", "passed", "detail"};
  for (const auto& ch : r.checks) t.rows.push_back({ch.name, std::string(ch.passed ? "true" : "false"), ch.detail});
  t.notes = r.notes;
  o.table = std::move(t);
  if (!r.ok()) {
    err << "validation failed: " << r.failures() << '\n';
    o.exit_code = kExitValidation;
  }
  return o;
}

std::vector<BranchingParams> read_family(RunConfig& c, const DiffusionParams& limit,
                                         const std::vector<std::int64_t>& n_list) {
  std::vector<BranchingParams> family;
  const bool fixed_pmf = c.has("model", "pmf1") || c.has("model", "pmf2");
  for (auto n : n_list) {
    if (n < 1) throw ConfigError("study.n_list entries must be >= 1");
    if (fixed_pmf) {
      BranchingParams bp;
      bp.n = n;
      bp.lambda1 = limit.lambda1;
      bp.lambda2 = limit.lambda2;
      bp.pmf1 = read_pmf(c, "pmf1");
      bp.pmf2 = read_pmf(c, "pmf2");
      bp.x0_count = lattice_count(limit.x0, n, "x0");
      bp.y0_count = lattice_count(limit.y0, n, "y0");
      bp.a_n = limit.a_n;
      family.push_back(bp);
    } else {
      family.push_back(branching_member(limit, n));
    }
  }
  return family;
}

Outcome cmd_params_family(RunConfig& c) {
  const DiffusionParams limit = read_diffusion(c);
  const auto n_list = c.get_ints("study", "n_list", {25, 50, 100});
  const double eps = c.get_double("study", "epsilon", 0.5);
  const auto family = read_family(c, limit, n_list);
  const FamilyReport rep = family_check(family, eps);
  Table t;
  t.columns = {"n", "tail1", "tail2", "c1", "c2", "alpha1", "alpha2", "lambda1", "lambda2", "x0", "y0"};
  for (const auto& r : rep.rows)
    t.rows.push_back({r.n, r.tail1, r.tail2, r.c1, r.c2, r.alpha1, r.alpha2, r.lambda1, r.lambda2, r.x0, r.y0});
  t.notes.push_back(std::string("tails_vanishing: ") + (rep.tails_vanishing ? "true" : "false"));
  for (const auto& f : rep.flags) t.notes.push_back("flag: " + f);
  Outcome o;
  o.table = std::move(t);
  return o;
}

Outcome cmd_simulate_bp(RunConfig& c, std::uint64_t seed) {
  const BranchingParams bp = read_branching(c);
  require_valid(bp, false);
  const double horizon = c.get_double("sim", "horizon", 1.0);
  const auto grid = output_grid(horizon, c.get_double("sim", "grid", horizon / 100.0));
  const std::size_t reps = read_reps(c, 1);
  const bool events = c.get_bool("sim", "event_log", false);
  if (events && reps != 1) throw ConfigError("sim.event_log needs sim.reps = 1");
  BpSimOptions opts;
  opts.exact_integrals = false;
  opts.event_log = events;
  std::vector<BpPathRecord> recs(reps);
  parallel_for(reps, 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) recs[r] = simulate_pair(bp, horizon, grid, RngStream{seed, r}, opts);
  });
  Table t;
  if (events) {
    t.columns = {"time", "event_type", "k", "x_int", "y_int", "z_int"};
    for (const auto& ev : recs[0].events)
      t.rows.push_back({ev.time, std::string(to_string(ev.type)), static_cast<std::int64_t>(ev.offspring), ev.x_int,
                        ev.y_int, ev.z_int});
  } else {
    const bool rep_col = reps > 1;
    t.columns = {"t", "x", "y", "z", "eta_hat"};
    if (rep_col) t.columns.insert(t.columns.begin(), "rep");
    for (std::size_t r = 0; r < reps; ++r)
      for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<Cell> row{recs[r].grid[i], recs[r].x[i], recs[r].y[i], recs[r].z[i], recs[r].eta_hat[i]};
        if (rep_col) row.insert(row.begin(), static_cast<std::int64_t>(r));
        t.rows.push_back(std::move(row));
      }
  }
  Outcome o;
  o.table = std::move(t);
  return o;
}

std::size_t output_stride(RunConfig& c, double horizon, double dt) {
  const double step = c.get_double("sim", "grid", horizon / 100.0);
  if (!(step > 0.0)) throw ConfigError("sim.grid must be positive");
  return static_cast<std::size_t>(std::max(1.0, std::round(step / dt)));
}

Outcome cmd_simulate_sde(RunConfig& c, std::uint64_t seed) {
  const DiffusionParams dp = read_diffusion(c);
  require_valid(dp, false);
  const double horizon = c.get_double("sim", "horizon", 1.0);
  const SdeGrid grid = SdeGrid::for_horizon(horizon, c.get_double("sim", "dt", 1e-3));
  const std::size_t stride = output_stride(c, horizon, grid.dt);
  const std::size_t reps = read_reps(c, 1);
  SdeOptions opts;
  opts.zero_noise = c.get_bool("sim", "zero_noise", false);
  std::vector<ReflectedPathSample> paths(reps);
  parallel_for(reps, 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) paths[r] = integrate_system(dp, grid, RngStream{seed, r}, opts);
  });
  Table t;
  const bool rep_col = reps > 1;
  t.columns = {"t", "X", "Y", "eta"};
  if (rep_col) t.columns.insert(t.columns.begin(), "rep");
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& p = paths[r];
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      if (i % stride != 0 && i + 1 != p.times.size()) continue;
      std::vector<Cell> row{p.times[i], p.x[i], p.y[i], p.eta[i]};
      if (rep_col) row.insert(row.begin(), static_cast<std::int64_t>(r));
      t.rows.push_back(std::move(row));
    }
  }
  Outcome o;
  o.table = std::move(t);
  return o;
}

Outcome cmd_simulate_averaged(RunConfig& c, std::uint64_t seed) {
  const DiffusionParams dp = read_diffusion(c);
  require_valid(dp, true);
  const double m = mean_mX(dp.c1, dp.alpha1);
  const double b = dp.c2 * dp.lambda2 * m;
  const double a = dp.alpha2 * dp.lambda2 * m;
  const double horizon = c.get_double("sim", "horizon", 1.0);
  const SdeGrid grid = SdeGrid::for_horizon(horizon, c.get_double("sim", "dt", 1e-3));
  const std::size_t stride = output_stride(c, horizon, grid.dt);
  const std::size_t reps = read_reps(c, 1);
  SdeOptions opts;
  opts.zero_noise = c.get_bool("sim", "zero_noise", false);
  std::vector<Path> paths(reps);
  parallel_for(reps, 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) paths[r] = integrate_averaged(b, a, dp.y0, grid, RngStream{seed, r}, opts);
  });
  Table t;
  const bool rep_col = reps > 1;
  t.columns = {"t", "Y_avg"};
  if (rep_col) t.columns.insert(t.columns.begin(), "rep");
  for (std::size_t r = 0; r < reps; ++r)
    for (std::size_t i = 0; i < paths[r].size(); ++i) {
      if (i % stride != 0 && i + 1 != paths[r].size()) continue;
      std::vector<Cell> row{paths[r].times[i], paths[r].values[i]};
      if (rep_col) row.insert(row.begin(), static_cast<std::int64_t>(r));
      t.rows.push_back(std::move(row));
    }
  t.notes.push_back("m_X = " + format_double(m) + ", b = " + format_double(b) + ", a = " + format_double(a));
  Outcome o;
  o.table = std::move(t);
  return o;
}

Outcome cmd_stationary_table(RunConfig& c) {
  const DiffusionParams dp = read_diffusion(c);
  const StationaryLaw law(dp.c1, dp.alpha1);
  const double lo = c.get_double("sim", "table_lo", 1.0);
  const double hi = c.get_double("sim", "table_hi", 10.0);
  const auto points = c.get_int("sim", "table_points", 91);
  if (points < 2 || !(hi > lo)) throw ConfigError("stationary table needs sim.table_points >= 2 and table_hi > table_lo");
  Table t;
  t.columns = {"x", "pdf", "cdf"};
  for (std::int64_t i = 0; i < points; ++i) {
    const double x = (i + 1 == points) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    t.rows.push_back({x, law.pdf(x), law.cdf(x)});
  }
  t.notes.push_back("theta = " + format_double(law.theta()) + ", m_X = " + format_double(law.mean()));
  Outcome o;
  o.table = std::move(t);
  return o;
}

Outcome cmd_stationary_sample(RunConfig& c, std::uint64_t seed) {
  const DiffusionParams dp = read_diffusion(c);
  const StationaryLaw law(dp.c1, dp.alpha1);
  const auto count = c.get_int("sim", "count", 1000);
  if (count < 1) throw ConfigError("sim.count must be >= 1");
  Table t;
  t.columns = {"x"};
  t.bare = true;
  for (double v : law.sample(static_cast<std::size_t>(count), RngStream{seed, 0})) t.rows.push_back({v});
  Outcome o;
  o.table = std::move(t);
  return o;
}

Outcome finish_reports(std::vector<StudyReport> reports) {
  Outcome o;
  for (auto& r : reports)
    if (!r.recompute_verdicts()) o.exit_code = kExitVerdict;
  o.reports = std::move(reports);
  return o;
}

Outcome cmd_verify_limit(RunConfig& c, std::uint64_t seed) {
  LimitStudyConfig cfg;
  cfg.limit = read_diffusion(c, 2.0, 1.0);
  cfg.n_list = c.get_ints("study", "n_list", cfg.n_list);
  cfg.family = read_family(c, cfg.limit, cfg.n_list);
  cfg.horizon = c.get_double("sim", "horizon", cfg.horizon);
  cfg.dt = c.get_double("sim", "dt", cfg.dt);
  cfg.reps = read_reps(c, static_cast<std::int64_t>(cfg.reps));
  cfg.repeats = static_cast<std::size_t>(std::max<std::int64_t>(1, c.get_int("study", "repeats", 20)));
  cfg.ks_tolerance = c.get_double("study", "ks_tolerance", cfg.ks_tolerance);
  return finish_reports({study_diffusion_limit(cfg, seed)});
}

Outcome cmd_verify_stationary(RunConfig& c, std::uint64_t seed) {
  StationaryStudyConfig cfg;
  cfg.c1 = c.get_double("model", "c1", cfg.c1);
  cfg.alpha1 = c.get_double("model", "alpha1", cfg.alpha1);
  cfg.lambda1 = c.get_double("model", "lambda1", cfg.lambda1);
  cfg.n_list = c.get_ints("study", "n_list", cfg.n_list);
  cfg.burn_in = c.get_double("sim", "burn_in", cfg.burn_in);
  cfg.gap = c.get_double("sim", "gap", cfg.gap);
  const auto count = c.get_int("sim", "count", static_cast<std::int64_t>(cfg.count));
  if (count < 1) throw ConfigError("sim.count must be >= 1");
  cfg.count = static_cast<std::size_t>(count);
  cfg.repeats = static_cast<std::size_t>(std::max<std::int64_t>(1, c.get_int("study", "repeats", 5)));
  cfg.ks_tolerance = c.get_double("study", "ks_tolerance", cfg.ks_tolerance);
  cfg.degenerate_row = c.get_bool("study", "degenerate_row", true);
  return finish_reports({study_stationary(cfg, seed)});
}

Outcome cmd_verify_averaging(RunConfig& c, std::uint64_t seed) {
  AveragingStudyConfig cfg;
  auto& p = cfg.params;
  p.c1 = c.get_double("model", "c1", p.c1);
  p.c2 = c.get_double("model", "c2", p.c2);
  p.alpha1 = c.get_double("model", "alpha1", p.alpha1);
  p.alpha2 = c.get_double("model", "alpha2", p.alpha2);
  p.lambda1 = c.get_double("model", "lambda1", p.lambda1);
  p.lambda2 = c.get_double("model", "lambda2", p.lambda2);
  p.x0 = c.get_double("model", "x0", p.x0);
  p.y0 = c.get_double("model", "y0", p.y0);
  cfg.a_n_list = c.get_doubles("study", "a_n_list", cfg.a_n_list);
  cfg.t_probe = c.get_double("study", "t_probe", cfg.t_probe);
  cfg.dt = c.get_double("sim", "dt", cfg.dt);
  cfg.reps = read_reps(c, static_cast<std::int64_t>(cfg.reps));
  cfg.repeats = static_cast<std::size_t>(std::max<std::int64_t>(1, c.get_int("study", "repeats", 20)));
  cfg.bp_n = c.get_int("study", "bp_n", cfg.bp_n);
  cfg.moment_se_multiple = c.get_double("study", "moment_se_multiple", cfg.moment_se_multiple);
  cfg.ks_tolerance = c.get_double("study", "ks_tolerance", cfg.ks_tolerance);
  const std::string regime = c.get_string("study", "regime", "both");
  std::vector<StudyReport> reports;
  if (regime == "both") {
    reports.push_back(study_averaging(cfg, AveragingRegime::kDiffusion, seed));
    reports.push_back(study_averaging(cfg, AveragingRegime::kBranching, seed));
  } else {
    reports.push_back(study_averaging(cfg, parse_regime(regime), seed));
  }
  return finish_reports(std::move(reports));
}

Outcome cmd_verify_echeverria(RunConfig& c) {
  const DiffusionParams dp = read_diffusion(c);
  return finish_reports({study_echeverria(dp.c1, dp.alpha1, dp.lambda1)});
}

// ---- emission ----

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Meta {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::optional<std::string> timestamp;
  std::map<std::string, std::string> config;
};

void write_csv_header(std::ostream& os, const Meta& m) {
  os << "# catbranch " << CATBRANCH_VERSION << '\n';
  os << "# command: " << m.command << '\n';
  os << "# config_hash: " << m.config_hash << '\n';
  os << "# seed: " << m.seed << '\n';
  if (m.timestamp) os << "# timestamp: " << *m.timestamp << '\n';
  for (const auto& [k, v] : m.config) os << "# config: " << k << " = " << v << '\n';
}

ordered_json meta_json(const Meta& m) {
  ordered_json j;
  j["tool"] = "catbranch";
  j["version"] = CATBRANCH_VERSION;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  if (m.timestamp) j["timestamp"] = *m.timestamp;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  j["config"] = cfg;
  return j;
}

void emit(std::ostream& os, const Meta& m, const Outcome& o, bool json, bool runtime) {
  if (json) {
    ordered_json j;
    j["meta"] = meta_json(m);
    if (o.table) {
      if (!o.table->notes.empty()) j["notes"] = o.table->notes;
      j["columns"] = o.table->columns;
      ordered_json rows = ordered_json::array();
      for (const auto& r : o.table->rows) {
        ordered_json row = ordered_json::array();
        for (const auto& cell : r) row.push_back(cell_json(cell));
        rows.push_back(std::move(row));
      }
      j["rows"] = std::move(rows);
    } else {
      ordered_json reps = ordered_json::array();
      for (const auto& r : o.reports) reps.push_back(ordered_json::parse(report_json(r, runtime)));
      j["reports"] = std::move(reps);
    }
    os << j.dump(2) << '\n';
    return;
  }
  write_csv_header(os, m);
  if (o.table) {
    for (const auto& n : o.table->notes) os << "# note: " << n << '\n';
    if (!o.table->bare) {
      for (std::size_t i = 0; i < o.table->columns.size(); ++i) os << (i ? "," : "") << o.table->columns[i];
      os << '\n';
    }
    for (const auto& r : o.table->rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
      os << '\n';
    }
  } else {
    if (runtime)
      for (const auto& r : o.reports) os << "# runtime_seconds: " << r.study << " = " << format_double(r.runtime_seconds) << '\n';
    std::ostringstream body;
    for (std::size_t i = 0; i < o.reports.size(); ++i) {
      std::ostringstream one;
      write_report_csv(one, o.reports[i]);
      std::string s = one.str();
      if (i > 0) s = s.substr(s.find('\n') + 1);  // single column header
      body << s;
    }
    os << body.str();
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"catbranch: near-critical catalyst-reactant branching simulation and verification"};
  app.set_version_flag("--version", CATBRANCH_VERSION);
  app.require_subcommand(1, 1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "configuration file (see docs/config.md)");
  app.add_option("--seed", g.seed, "64-bit master seed (overrides the config)");
  app.add_option("--reps", g.reps, "replications (overrides sim.reps)");
  app.add_option("--out", g.out, "output path (default: stdout)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", g.threads, "worker threads (0: machine parallelism)");
  app.add_flag("--no-timestamp", g.no_timestamp, "omit the timestamp and runtime from the output");
  app.add_option("--isa", g.isa, "SIMD kernel set")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  struct Group {
    const char* name;
    const char* help;
    std::vector<std::pair<const char*, const char*>> leaves;
  };
  const std::vector<Group> groups = {
      {"params", "parameter validation", {{"check", "check the standing conditions"}, {"family", "tail and constant trajectories of a family"}}},
      {"simulate", "path simulation", {{"bp", "exact branching process"}, {"sde", "reflected catalyst-reactant SDE"}, {"averaged", "averaged reactant SDE"}}},
      {"stationary", "stationary catalyst law", {{"table", "x, pdf, cdf table"}, {"sample", "exact draws, one per line"}}},
      {"verify", "verification studies", {{"limit", "diffusion limit"}, {"stationary", "stationary convergence"}, {"averaging", "stochastic averaging"}, {"echeverria", "Echeverria residuals"}}},
  };
  std::vector<std::pair<CLI::App*, std::string>> leaves;
  for (const auto& grp : groups) {
    auto* sub = app.add_subcommand(grp.name, grp.help);
    sub->require_subcommand(1, 1);
    sub->fallthrough();
    for (const auto& [leaf, help] : grp.leaves) {
      auto* l = sub->add_subcommand(leaf, help);
      l->fallthrough();
      leaves.push_back({l, std::string(grp.name) + " " + leaf});
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << '\n' << schema_help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << CATBRANCH_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help() << '\n' << schema_help();
    return kExitValidation;
  }
  std::string command;
  for (const auto& [l, name] : leaves)
    if (l->parsed()) command = name;

  try {
    RunConfig cfg = g.config_path.empty() ? RunConfig::parse("", "<none>") : RunConfig::load(g.config_path);
    if (g.seed) cfg.set("", "seed", std::to_string(*g.seed));
    if (g.reps) cfg.set("sim", "reps", std::to_string(*g.reps));
    if (!g.out.empty()) cfg.set("io", "out", g.out);
    if (!g.format.empty()) cfg.set("io", "format", g.format);
    const std::uint64_t seed = cfg.get_u64("", "seed", 1);
    const std::string format = cfg.get_string("io", "format", "csv");
    if (format != "csv" && format != "json") throw ConfigError("io.format must be csv or json");
    const std::string out_path = cfg.has("io", "out") ? cfg.get_string("io", "out", "") : "";
    set_worker_threads(g.threads);
    if (g.isa == "scalar") simd::force_isa(simd::Isa::kScalar);
    else if (g.isa == "avx2") simd::force_isa(simd::Isa::kAvx2);
    else simd::force_isa(std::nullopt);
    simd::kernels_for(simd::active_kernels().isa);

    Outcome o;
    if (command == "params check") o = cmd_params_check(cfg, err);
    else if (command == "params family") o = cmd_params_family(cfg);
    else if (command == "simulate bp") o = cmd_simulate_bp(cfg, seed);
    else if (command == "simulate sde") o = cmd_simulate_sde(cfg, seed);
    else if (command == "simulate averaged") o = cmd_simulate_averaged(cfg, seed);
    else if (command == "stationary table") o = cmd_stationary_table(cfg);
    else if (command == "stationary sample") o = cmd_stationary_sample(cfg, seed);
    else if (command == "verify limit") o = cmd_verify_limit(cfg, seed);
    else if (command == "verify stationary") o = cmd_verify_stationary(cfg, seed);
    else if (command == "verify averaging") o = cmd_verify_averaging(cfg, seed);
    else if (command == "verify echeverria") o = cmd_verify_echeverria(cfg);
    else throw ConfigError("no command selected");

    Meta meta;
    meta.command = command;
    meta.config_hash = "fnv1a64:" + hex64(fnv1a64(cfg.source_bytes()));
    meta.seed = seed;
    if (!g.no_timestamp) meta.timestamp = utc_timestamp();
    meta.config = cfg.effective();
    if (out_path.empty()) {
      emit(out, meta, o, format == "json", !g.no_timestamp);
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
      emit(f, meta, o, format == "json", !g.no_timestamp);
      if (!f) throw std::runtime_error("failed writing output file '" + out_path + "'");
    }
    if (o.exit_code == kExitVerdict) err << "verification failed: at least one verdict is fail\n";
    return o.exit_code;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return dispatch(args, out, err);
}

}  // namespace catbranch::cli
