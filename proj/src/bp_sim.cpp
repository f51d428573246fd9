#include "catbranch/bp_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>

#include "catbranch/alias_table.hpp"
#include "catbranch/format.hpp"

namespace catbranch {

AliasTable::AliasTable(const std::vector<double>& probs) {
  const std::size_t k = probs.size();
  if (k == 0 || k > (1ull << 31)) throw std::invalid_argument("alias table: bad support size");
  double total = 0.0;
  for (double p : probs) total += p;
  std::vector<double> scaled(k);
  for (std::size_t i = 0; i < k; ++i) scaled[i] = probs[i] / total * static_cast<double>(k);
  prob_.assign(k, 0);
  alias_.resize(k);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < k; ++i) (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  constexpr double kOne = 4294967296.0;
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = static_cast<std::uint64_t>(std::llround(scaled[s] * kOne));
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) {
    prob_[i] = 1ull << 32;
    alias_[i] = i;
  }
  // leftovers from rounding carry (numerically) full mass
  for (auto i : small) {
    prob_[i] = 1ull << 32;
    alias_[i] = i;
  }
}

const char* to_string(BpEventType t) {
  switch (t) {
    case BpEventType::kCatalyst: return "catalyst";
    case BpEventType::kReplenish: return "replenish";
    case BpEventType::kReactant: return "reactant";
  }
  return "?";
}

namespace {

constexpr std::int64_t kCountLimit = std::int64_t{1} << 62;

std::atomic<std::uint64_t> g_below_boundary{0};
std::atomic<std::uint64_t> g_post_absorption{0};
std::atomic<std::uint64_t> g_checked{0};

void check_structure(const BranchingParams& p) {
  if (p.n < 1) throw std::invalid_argument("simulate_pair: n must be >= 1");
  if (!(p.lambda1 > 0.0) || !(p.lambda2 > 0.0)) throw std::invalid_argument("simulate_pair: rates must be positive");
  if (p.x0_count < p.n) throw std::invalid_argument("simulate_pair: x0 must be >= 1");
  if (p.y0_count < 0) throw std::invalid_argument("simulate_pair: y0 must be >= 0");
  if (!(p.a_n >= 1.0)) throw std::invalid_argument("simulate_pair: a_n must be >= 1");
}

}  // namespace

BpInvariantCounters bp_invariant_counters() {
  return {g_below_boundary.load(), g_post_absorption.load(), g_checked.load()};
}

BpPathRecord simulate_pair(const BranchingParams& params, double horizon, std::span<const double> grid, RngStream rng,
                           const BpSimOptions& options) {
  check_structure(params);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("simulate_pair: horizon must be positive");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > horizon) throw std::invalid_argument("simulate_pair: grid time outside [0, horizon]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("simulate_pair: grid not strictly increasing");
  }

  const std::int64_t n = params.n;
  const double inv_n = 1.0 / static_cast<double>(n);
  const AliasTable offspring1(params.pmf1.probs());
  const AliasTable offspring2(params.pmf2.probs());
  const double rate1_per_particle = params.a_n * params.lambda1 * static_cast<double>(n);
  const double rate2_coef = params.lambda2;
  const double eta_coef = params.a_n * params.lambda1 * static_cast<double>(n) * params.pmf1[0];
  const bool window = options.window_start >= 0.0;

  StreamEngine eng(rng, StreamDomain::kBranching);

  BpPathRecord rec;
  rec.n = n;
  rec.horizon = horizon;
  rec.grid.assign(grid.begin(), grid.end());
  rec.x.reserve(grid.size());
  rec.y.reserve(grid.size());
  rec.z.reserve(grid.size());
  rec.eta_hat.reserve(grid.size());

  std::int64_t x = params.x0_count, y = params.y0_count, z = params.x0_count;
  double t = 0.0, boundary_time = 0.0;
  PathIntegrals integ;
  std::uint64_t events = 0, below = 0, post_abs = 0;
  std::size_t gi = 0;

  auto record_until = [&](double t_next) {
    while (gi < grid.size() && grid[gi] < t_next) {
      const double bt = boundary_time + (x == n ? grid[gi] - t : 0.0);
      rec.x.push_back(static_cast<double>(x) * inv_n);
      rec.y.push_back(static_cast<double>(y) * inv_n);
      rec.z.push_back(static_cast<double>(z) * inv_n);
      rec.eta_hat.push_back(eta_coef * bt);
      ++gi;
    }
  };

  for (;;) {
    const double xd = static_cast<double>(x);
    const double r1 = rate1_per_particle * xd;
    const double r2 = rate2_coef * xd * static_cast<double>(y);
    const double total = r1 + r2;
    const double t_next = t - std::log(eng.uniform()) / total;
    record_until(t_next);
    const double t_end = std::min(t_next, horizon);
    const double sojourn = t_end - t;
    if (x == n) boundary_time += sojourn;
    if (options.exact_integrals) {
      const double xs = xd * inv_n;
      integ.int_x += xs * sojourn;
      integ.int_xy += xs * (static_cast<double>(y) * inv_n) * sojourn;
      if (window && t_end > options.window_start)
        integ.window_x += xs * (t_end - std::max(t, options.window_start));
    }
    if (t_next > horizon) break;
    t = t_next;
    ++events;

    BpEvent ev;
    if (r2 == 0.0 || eng.uniform() * total < r1) {
      const std::uint32_t k = offspring1.sample(eng());
      z += static_cast<std::int64_t>(k) - 1;
      if (k == 0 && x == n) {
        ev.type = BpEventType::kReplenish;
      } else {
        x += static_cast<std::int64_t>(k) - 1;
        ev.type = BpEventType::kCatalyst;
      }
      if (x < n) ++below;
      ev.offspring = k;
    } else {
      if (y == 0) ++post_abs;
      const std::uint32_t k = offspring2.sample(eng());
      y += static_cast<std::int64_t>(k) - 1;
      ev.type = BpEventType::kReactant;
      ev.offspring = k;
    }
    if (x > kCountLimit || y > kCountLimit || z > kCountLimit || z < -kCountLimit)
      throw PopulationOverflow("simulate_pair: population count exceeded 2^62 at t=" + format_double(t));
    if (options.event_log) {
      ev.time = t;
      ev.x_int = x;
      ev.y_int = y;
      ev.z_int = z;
      rec.events.push_back(ev);
    }
  }
  record_until(std::numeric_limits<double>::infinity());

  g_below_boundary += below;
  g_post_absorption += post_abs;
  g_checked += events;

  rec.event_count = events;
  rec.final_state = {x, y, z, horizon, boundary_time};
  if (options.exact_integrals) {
    integ.boundary_time = boundary_time;
    rec.integrals = integ;
  }
  return rec;
}

MartingaleDiagnostics martingale_diagnostics(const BpPathRecord& rec, const BranchingParams& params) {
  if (!rec.integrals) throw std::invalid_argument("martingale_diagnostics: record carries no exact event integrals");
  if (rec.n != params.n) throw std::invalid_argument("martingale_diagnostics: record and params disagree on n");
  const auto& in = *rec.integrals;
  const double inv_n = 1.0 / static_cast<double>(params.n);
  const double x_t = static_cast<double>(rec.final_state.x_int) * inv_n;
  const double z_t = static_cast<double>(rec.final_state.z_int) * inv_n;
  const double l1 = params.a_n * params.lambda1;
  const double mu0 = params.pmf1[0];
  const double eta_t = l1 * static_cast<double>(params.n) * mu0 * in.boundary_time;
  MartingaleDiagnostics d;
  d.residual_x = x_t - params.x0() - params.c1() * l1 * in.int_x - eta_t;
  d.qv_rhs = l1 * params.alpha1() * in.int_x - l1 * mu0 * in.boundary_time;
  d.shadow_residual = x_t - z_t - eta_t;
  return d;
}

std::vector<double> occupation_sampler(const BranchingParams& params, double burn_in, double gap, std::size_t count,
                                       RngStream rng) {
  if (!(burn_in > 0.0) || !(gap > 0.0)) throw std::invalid_argument("occupation_sampler: burn_in and gap must be positive");
  if (count == 0) return {};
  const double horizon = burn_in + static_cast<double>(count) * gap;
  if (!std::isfinite(horizon) || horizon > 1e12) throw std::invalid_argument("occupation_sampler: horizon overflow");
  // The reactant does not feed back on the catalyst, so it is left out.
  BranchingParams catalyst_only = params;
  catalyst_only.y0_count = 0;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = burn_in + static_cast<double>(i + 1) * gap;
  grid.back() = std::min(grid.back(), horizon);
  BpSimOptions opts;
  opts.exact_integrals = false;
  auto rec = simulate_pair(catalyst_only, horizon, grid, rng, opts);
  return std::move(rec.x);
}

void write_bp_grid_csv(std::ostream& os, std::span<const BpPathRecord> recs) {
  const bool rep_col = recs.size() > 1;
  os << (rep_col ? "rep,t,x,y,z,eta_hat\n" : "t,x,y,z,eta_hat\n");
  for (std::size_t r = 0; r < recs.size(); ++r) {
    const auto& rec = recs[r];
    for (std::size_t i = 0; i < rec.grid.size(); ++i) {
      if (rep_col) os << r << ',';
      os << format_double(rec.grid[i]) << ',' << format_double(rec.x[i]) << ',' << format_double(rec.y[i]) << ','
         << format_double(rec.z[i]) << ',' << format_double(rec.eta_hat[i]) << '\n';
    }
  }
}

void write_bp_event_csv(std::ostream& os, const BpPathRecord& rec) {
  os << "time,event_type,k,x_int,y_int,z_int\n";
  for (const auto& e : rec.events)
    os << format_double(e.time) << ',' << to_string(e.type) << ',' << e.offspring << ',' << e.x_int << ',' << e.y_int
       << ',' << e.z_int << '\n';
}

}  // namespace catbranch
