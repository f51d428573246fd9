#include "catbranch/studies.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "catbranch/bp_sim.hpp"
#include "catbranch/format.hpp"
#include "catbranch/parallel.hpp"
#include "catbranch/rng.hpp"
#include "catbranch/sde_sim.hpp"
#include "catbranch/stationary.hpp"
#include "catbranch/stats.hpp"

namespace catbranch {

namespace {

constexpr std::uint64_t kTagLimit = 0x4c494d49;
constexpr std::uint64_t kTagStationary = 0x53544154;
constexpr std::uint64_t kTagAveraging = 0x41564552;
constexpr std::uint64_t kTagReference = 0x52454600;
constexpr std::uint64_t kTagSampler = 0x53414d50;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

struct BpMarginals {
  std::vector<double> x, y, window_mean_x;
};

BpMarginals bp_marginals(const BranchingParams& p, double horizon, std::uint64_t seed, std::size_t reps,
                         double window_start = -1.0) {
  BpMarginals out;
  out.x.resize(reps);
  out.y.resize(reps);
  const bool window = window_start >= 0.0;
  if (window) out.window_mean_x.resize(reps);
  const double grid[1] = {horizon};
  BpSimOptions opts;
  opts.exact_integrals = window;
  opts.window_start = window_start;
  parallel_for(reps, 16, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto rec = simulate_pair(p, horizon, grid, RngStream{seed, r}, opts);
      out.x[r] = rec.x[0];
      out.y[r] = rec.y[0];
      if (window) out.window_mean_x[r] = rec.integrals->window_x / (horizon - window_start);
    }
  });
  return out;
}

std::string n_label(std::int64_t n) { return "n=" + std::to_string(n); }

std::string a_label(double a) { return "a_n=" + format_double(a); }

void add_trend_rows(StudyReport& rep, const std::string& metric, const std::vector<std::string>& labels,
                    const std::vector<double>& medians) {
  for (std::size_t i = 1; i < medians.size(); ++i) {
    MetricRow row;
    row.param = labels[i - 1] + "->" + labels[i];
    row.metric = metric + "_step";
    row.value = medians[i] - medians[i - 1];
    row.tolerance = 0.0;
    row.comparator = Comparator::kLessEqual;
    row.note = "median over repeats must not increase";
    rep.add(row);
  }
}

MetricRow info(std::string param, std::string metric, double value, std::optional<double> se = std::nullopt) {
  MetricRow r;
  r.param = std::move(param);
  r.metric = std::move(metric);
  r.value = value;
  r.stderr_value = se;
  return r;
}

MetricRow bound(std::string param, std::string metric, double value, double tol, Comparator cmp, std::string note) {
  MetricRow r;
  r.param = std::move(param);
  r.metric = std::move(metric);
  r.value = value;
  r.tolerance = tol;
  r.comparator = cmp;
  r.note = std::move(note);
  return r;
}

std::string join_ints(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

}  // namespace

void check_family_matches(const std::vector<BranchingParams>& family, const DiffusionParams& limit) {
  for (const auto& m : family) {
    const DiffusionParams d = diffusion_limit_of(m);
    const bool ok = rel_close(d.c1, limit.c1) && rel_close(d.c2, limit.c2) && rel_close(d.alpha1, limit.alpha1) &&
                    rel_close(d.alpha2, limit.alpha2) && rel_close(d.lambda1, limit.lambda1) &&
                    rel_close(d.lambda2, limit.lambda2) && rel_close(d.x0, limit.x0) && rel_close(d.y0, limit.y0);
    if (!ok)
      throw FamilyMismatch("family member n=" + std::to_string(m.n) + " has limit constants (c1=" +
                           format_double(d.c1) + ", c2=" + format_double(d.c2) + ", alpha1=" + format_double(d.alpha1) +
                           ", alpha2=" + format_double(d.alpha2) + ", x0=" + format_double(d.x0) +
                           ", y0=" + format_double(d.y0) + ") that differ from the diffusion parameters");
  }
}

StudyReport study_diffusion_limit(const LimitStudyConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  require_valid(cfg.limit, false);
  if (cfg.reps < 2 || cfg.repeats < 1) throw std::invalid_argument("study_diffusion_limit: need reps >= 2, repeats >= 1");
  std::vector<BranchingParams> family = cfg.family;
  if (family.empty())
    for (auto n : cfg.n_list) family.push_back(branching_member(cfg.limit, n));
  check_family_matches(family, cfg.limit);
  for (const auto& m : family) require_valid(m, false);
  const SdeGrid grid = SdeGrid::for_horizon(cfg.horizon, cfg.dt);

  StudyReport rep;
  rep.study = "diffusion_limit";
  rep.settings = {{"n_list", join_ints(cfg.n_list)},
                  {"horizon", format_double(cfg.horizon)},     {"dt", format_double(cfg.dt)},
                  {"reps", std::to_string(cfg.reps)},          {"repeats", std::to_string(cfg.repeats)},
                  {"ks_tolerance", format_double(cfg.ks_tolerance)},
                  {"x0", format_double(cfg.limit.x0)},         {"y0", format_double(cfg.limit.y0)},
                  {"c1", format_double(cfg.limit.c1)},         {"c2", format_double(cfg.limit.c2)},
                  {"alpha1", format_double(cfg.limit.alpha1)}, {"alpha2", format_double(cfg.limit.alpha2)}};
  rep.seeds = {{"master", seed}};

  const std::size_t nf = family.size();
  std::vector<std::vector<double>> ks_x(nf), ks_y(nf), w1_x(nf);
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    const std::uint64_t s = derive_seed(seed, {kTagLimit, r});
    const auto sde = system_marginals(cfg.limit, grid, s, 0, cfg.reps);
    const EmpiricalSample sx(sde.x), sy(sde.y);
    for (std::size_t i = 0; i < nf; ++i) {
      const auto bp = bp_marginals(family[i], cfg.horizon, derive_seed(s, {static_cast<std::uint64_t>(family[i].n)}),
                                   cfg.reps);
      const EmpiricalSample bx(bp.x), by(bp.y);
      ks_x[i].push_back(ks_two_sample(bx, sx));
      ks_y[i].push_back(ks_two_sample(by, sy));
      w1_x[i].push_back(wasserstein1(bx, sx));
    }
  }

  std::vector<std::string> labels;
  std::vector<double> med_x, med_y;
  for (std::size_t i = 0; i < nf; ++i) {
    labels.push_back(n_label(family[i].n));
    rep.sweep.push_back(labels.back());
    med_x.push_back(median(ks_x[i]));
    med_y.push_back(median(ks_y[i]));
    rep.add(info(labels[i], "ks_x_median", med_x[i]));
    rep.add(info(labels[i], "ks_y_median", med_y[i]));
    rep.add(info(labels[i], "ks_x_first_repeat", ks_x[i][0]));
    rep.add(info(labels[i], "w1_x_median", median(w1_x[i])));
  }
  rep.add(bound(labels.back(), "ks_x_largest_n", med_x.back(), cfg.ks_tolerance, Comparator::kLess,
                "catalyst KS at the largest n"));
  rep.add(bound(labels.back(), "ks_y_largest_n", med_y.back(), cfg.ks_tolerance, Comparator::kLess,
                "reactant KS at the largest n"));
  add_trend_rows(rep, "ks_x_median", labels, med_x);
  add_trend_rows(rep, "ks_y_median", labels, med_y);
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

StudyReport study_stationary(const StationaryStudyConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  if (!(cfg.c1 < 0.0)) throw std::invalid_argument("study_stationary: supercritical family (c1 >= 0)");
  if (cfg.count < 1 || cfg.repeats < 1) throw std::invalid_argument("study_stationary: need count >= 1, repeats >= 1");
  const StationaryLaw law(cfg.c1, cfg.alpha1);
  const DiffusionParams limit{cfg.c1, 0.0, cfg.alpha1, 1.0, cfg.lambda1, 1.0, 1.0, 0.0, 1.0};
  std::vector<BranchingParams> family = cfg.family;
  if (family.empty())
    for (auto n : cfg.n_list) family.push_back(branching_member(limit, n));
  for (const auto& m : family) {
    if (!(m.c1() < 0.0)) throw std::invalid_argument("study_stationary: supercritical member n=" + std::to_string(m.n));
    const DiffusionParams d = diffusion_limit_of(m);
    if (!rel_close(d.c1, cfg.c1) || !rel_close(d.alpha1, cfg.alpha1) || !rel_close(d.lambda1, cfg.lambda1))
      throw FamilyMismatch("study_stationary: member n=" + std::to_string(m.n) + " does not match (c1, alpha1, lambda1)");
  }

  StudyReport rep;
  rep.study = "stationary";
  rep.settings = {{"n_list", join_ints(cfg.n_list)},
                  {"c1", format_double(cfg.c1)},         {"alpha1", format_double(cfg.alpha1)},
                  {"lambda1", format_double(cfg.lambda1)}, {"burn_in", format_double(cfg.burn_in)},
                  {"gap", format_double(cfg.gap)},       {"count", std::to_string(cfg.count)},
                  {"repeats", std::to_string(cfg.repeats)}, {"ks_tolerance", format_double(cfg.ks_tolerance)}};
  rep.seeds = {{"master", seed}};
  auto cdf = [&law](double x) { return law.cdf(x); };

  const std::size_t nf = family.size();
  std::vector<std::vector<double>> ks(nf);
  std::vector<double> first_mean(nf);
  // Each (repeat, n) pair is one long trajectory; run them side by side.
  std::vector<double> flat(cfg.repeats * nf);
  std::vector<double> means(cfg.repeats * nf);
  parallel_for(cfg.repeats * nf, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const std::size_t r = j / nf, i = j % nf;
      const auto& m = family[i];
      const auto draws = occupation_sampler(
          m, cfg.burn_in, cfg.gap, cfg.count,
          RngStream{derive_seed(seed, {kTagStationary, r, static_cast<std::uint64_t>(m.n)}), 0});
      double sum = 0.0;
      for (double v : draws) sum += v;
      means[j] = sum / static_cast<double>(draws.size());
      flat[j] = ks_one_sample(EmpiricalSample(draws), cdf);
    }
  });
  for (std::size_t r = 0; r < cfg.repeats; ++r)
    for (std::size_t i = 0; i < nf; ++i) ks[i].push_back(flat[r * nf + i]);
  for (std::size_t i = 0; i < nf; ++i) first_mean[i] = means[i];

  std::vector<std::string> labels;
  std::vector<double> med;
  for (std::size_t i = 0; i < nf; ++i) {
    labels.push_back(n_label(family[i].n));
    rep.sweep.push_back(labels.back());
    med.push_back(median(ks[i]));
    rep.add(info(labels[i], "ks_median", med[i]));
    rep.add(info(labels[i], "ks_first_repeat", ks[i][0]));
    rep.add(info(labels[i], "sample_mean_first_repeat", first_mean[i]));
  }
  rep.add(info("limit", "m_X", law.mean()));
  rep.add(bound(labels.back(), "ks_largest_n", med.back(), cfg.ks_tolerance, Comparator::kLess,
                "occupation KS at the largest n"));
  add_trend_rows(rep, "ks_median", labels, med);

  if (cfg.degenerate_row) {
    BranchingParams deg;
    deg.n = 1;
    deg.lambda1 = cfg.lambda1;
    deg.pmf1 = OffspringPmf::delta(0);
    deg.pmf2 = OffspringPmf::delta(1);
    deg.x0_count = 1;
    const StationaryLaw deg_law(deg.c1(), deg.alpha1());
    const auto draws = occupation_sampler(deg, cfg.burn_in, cfg.gap, std::min<std::size_t>(cfg.count, 1000),
                                          RngStream{derive_seed(seed, {kTagStationary, 0xDE6}), 0});
    auto row = info("n=1,pmf1=delta0", "ks_degenerate",
                    ks_one_sample(EmpiricalSample(draws), [&](double x) { return deg_law.cdf(x); }));
    row.note = "all mass at 1; KS equals the cdf gap at 1; no verdict";
    rep.add(row);
  }

  const std::uint64_t sampler_seed = derive_seed(seed, {kTagSampler});
  rep.seeds.push_back({"sampler", sampler_seed});
  const auto exact = law.sample(cfg.count, RngStream{sampler_seed, 0});
  rep.add(bound("sampler", "ks_self_test", ks_one_sample(EmpiricalSample(exact), cdf), ks_critical_95(cfg.count),
                Comparator::kLess, "exact sampler vs own cdf at the 95% critical value"));
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

const char* to_string(AveragingRegime r) { return r == AveragingRegime::kDiffusion ? "diffusion" : "branching"; }

AveragingRegime parse_regime(const std::string& s) {
  if (s == "diffusion") return AveragingRegime::kDiffusion;
  if (s == "branching") return AveragingRegime::kBranching;
  throw std::invalid_argument("invalid averaging regime '" + s + "' (expected diffusion or branching)");
}

StudyReport study_averaging(const AveragingStudyConfig& cfg, AveragingRegime regime, std::uint64_t seed) {
  const auto t0 = Clock::now();
  require_valid(cfg.params, true);
  if (!(cfg.t_probe > 0.0)) throw std::invalid_argument("study_averaging: t_probe must be positive");
  if (cfg.a_n_list.empty()) throw std::invalid_argument("study_averaging: empty a_n list");
  if (cfg.reps < 2 || cfg.repeats < 1) throw std::invalid_argument("study_averaging: need reps >= 2, repeats >= 1");
  for (double a : cfg.a_n_list)
    if (!(a >= 1.0)) throw std::invalid_argument("study_averaging: a_n must be >= 1");

  const auto& p = cfg.params;
  const double m_x = mean_mX(p.c1, p.alpha1);
  const double b = p.c2 * p.lambda2 * m_x;
  const double a = p.alpha2 * p.lambda2 * m_x;
  const double ebt = std::exp(b * cfg.t_probe);
  const double mean_cf = p.y0 * ebt;
  const double var_cf = b == 0.0 ? a * p.y0 * cfg.t_probe : a * p.y0 * ebt * (ebt - 1.0) / b;
  const SdeGrid slow = SdeGrid::for_horizon(cfg.t_probe, cfg.dt);

  StudyReport rep;
  rep.study = std::string("averaging_") + to_string(regime);
  rep.settings = {{"regime", to_string(regime)},
                  {"t_probe", format_double(cfg.t_probe)},
                  {"dt", format_double(cfg.dt)},
                  {"reps", std::to_string(cfg.reps)},
                  {"repeats", std::to_string(cfg.repeats)},
                  {"a_n_list", join_doubles(cfg.a_n_list)},
                  {"ks_tolerance", format_double(cfg.ks_tolerance)},
                  {"x0", format_double(p.x0)},
                  {"y0", format_double(p.y0)},
                  {"m_X", format_double(m_x)},
                  {"b", format_double(b)},
                  {"a", format_double(a)}};
  if (regime == AveragingRegime::kBranching) rep.settings.push_back({"bp_n", std::to_string(cfg.bp_n)});
  rep.seeds = {{"master", seed}};
  rep.add(info("closed_form", "mean", mean_cf));
  rep.add(info("closed_form", "variance", var_cf));

  const std::size_t na = cfg.a_n_list.size();
  std::vector<std::vector<double>> ks(na);
  std::vector<MomentSummary> first_moments(na);
  std::vector<double> first_window(na);
  MomentSummary ref_moments;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    const std::uint64_t s = derive_seed(seed, {kTagAveraging, r});
    const auto ref = averaged_marginals(b, a, p.y0, slow, derive_seed(s, {kTagReference}), 0, cfg.reps);
    if (r == 0) ref_moments = moments(ref);
    const EmpiricalSample ref_sample(ref);
    for (std::size_t i = 0; i < na; ++i) {
      const double an = cfg.a_n_list[i];
      const double h = std::min(cfg.t_probe, 1.0 / std::sqrt(an));
      const std::uint64_t rs = derive_seed(s, {static_cast<std::uint64_t>(i)});
      std::vector<double> y, window;
      if (regime == AveragingRegime::kDiffusion) {
        DiffusionParams fast = p;
        fast.a_n = an;
        const SdeGrid grid = SdeGrid::for_horizon(cfg.t_probe, cfg.dt / an);
        const auto wsteps = static_cast<std::uint64_t>(std::llround(h / grid.dt));
        auto sm = system_marginals(fast, grid, rs, 0, cfg.reps, {}, std::max<std::uint64_t>(1, wsteps));
        y = std::move(sm.y);
        window = std::move(sm.window_mean_x);
      } else {
        BranchingParams member = branching_member(p, cfg.bp_n);
        member.a_n = an;
        auto bm = bp_marginals(member, cfg.t_probe, rs, cfg.reps, cfg.t_probe - h);
        y = std::move(bm.y);
        window = std::move(bm.window_mean_x);
      }
      ks[i].push_back(ks_two_sample(EmpiricalSample(y), ref_sample));
      if (r == 0) {
        first_moments[i] = moments(y);
        double sum = 0.0;
        for (double w : window) sum += w;
        first_window[i] = sum / static_cast<double>(window.size());
      }
    }
  }

  rep.add(info("reference", "mean", ref_moments.mean, ref_moments.se_mean));
  rep.add(info("reference", "variance", ref_moments.variance, ref_moments.se_variance));
  std::vector<double> med;
  for (std::size_t i = 0; i < na; ++i) {
    const std::string label = a_label(cfg.a_n_list[i]);
    rep.sweep.push_back(label);
    med.push_back(median(ks[i]));
    rep.add(info(label, "ks_median", med[i]));
    rep.add(info(label, "mean", first_moments[i].mean, first_moments[i].se_mean));
    rep.add(info(label, "variance", first_moments[i].variance, first_moments[i].se_variance));
    auto w = info(label, "window_mean_x", first_window[i]);
    w.note = "catalyst average over the trailing window h_n = a_n^(-1/2)";
    rep.add(w);
    rep.add(info(label, "window_gap_to_m_X", std::abs(first_window[i] - m_x)));
  }
  const std::string last = a_label(cfg.a_n_list.back());
  const auto& fm = first_moments.back();
  const double k = cfg.moment_se_multiple;
  rep.add(bound(last, "mean_abs_error", std::abs(fm.mean - mean_cf), k * fm.se_mean, Comparator::kLessEqual,
                "|mean - closed form| within " + format_double(k) + " SE"));
  rep.add(bound(last, "variance_abs_error", std::abs(fm.variance - var_cf), k * fm.se_variance, Comparator::kLessEqual,
                "|variance - closed form| within " + format_double(k) + " SE"));
  rep.add(bound(last, "ks_largest_a_n", med.back(), cfg.ks_tolerance, Comparator::kLess,
                "median KS against the averaged SDE at the largest a_n"));
  if (na > 1)
    rep.add(bound(a_label(cfg.a_n_list.front()) + "->" + last, "ks_median_drop", med.back() - med.front(), 0.0,
                  na > 1 && med.front() == 0.0 ? Comparator::kLessEqual : Comparator::kLess,
                  "median KS at the largest a_n below the smallest"));
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

StudyReport study_echeverria(double c1, double alpha1, double lambda1, double tolerance, double mutation_floor) {
  const auto t0 = Clock::now();
  const StationaryLaw law(c1, alpha1);
  StudyReport rep;
  rep.study = "echeverria";
  rep.settings = {{"c1", format_double(c1)},
                  {"alpha1", format_double(alpha1)},
                  {"lambda1", format_double(lambda1)},
                  {"boundary_constant", "p(1)/2"},
                  {"mutated_constant", "p(1)"}};
  double worst = 0.0;
  for (const auto& phi : echeverria_library()) {
    rep.sweep.push_back(phi.name());
    const double res = echeverria_residual(law, phi, lambda1, 0.5);
    worst = std::max(worst, std::abs(res));
    rep.add(bound(phi.name(), "abs_residual", std::abs(res), tolerance, Comparator::kLess, ""));
    const double slope = phi.d1(1.0);
    rep.add(info(phi.name(), "phi_prime_at_1", slope));
    const double mutated = std::abs(echeverria_residual(law, phi, lambda1, 1.0));
    if (slope != 0.0)
      rep.add(bound(phi.name(), "abs_residual_mutated", mutated, mutation_floor, Comparator::kGreater,
                    "boundary constant replaced by p(1)"));
    else
      rep.add(info(phi.name(), "abs_residual_mutated", mutated));
  }
  rep.add(bound("library", "max_abs_residual", worst, tolerance, Comparator::kLess, ""));
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

}  // namespace catbranch
