#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "catbranch/alias_table.hpp"
#include "catbranch/bp_sim.hpp"
#include "catbranch/stats.hpp"

using namespace catbranch;

namespace {

BranchingParams defaults(std::int64_t n = 20) {
  BranchingParams p;
  p.n = n;
  p.pmf1 = parse_pmf("0:0.3,1:0.45,2:0.25");
  p.pmf2 = p.pmf1;
  p.x0_count = n;
  p.y0_count = n;
  return p;
}

std::vector<double> grid01() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(0.1 * i);
  return g;
}

}  // namespace

TEST(AliasTable, FrequenciesMatchPmf) {
  const std::vector<double> p{0.1, 0.0, 0.25, 0.65};
  const AliasTable t(p);
  StreamEngine e({1, 0}, StreamDomain::kBranching);
  std::vector<int> counts(p.size(), 0);
  const int n = 400000;
  for (int i = 0; i < n; ++i) ++counts[t.sample(e())];
  EXPECT_EQ(counts[1], 0);
  for (std::size_t k = 0; k < p.size(); ++k)
    EXPECT_NEAR(counts[k] / static_cast<double>(n), p[k], 5.0 * std::sqrt(p[k] * (1 - p[k]) / n) + 1e-12);
}

TEST(BpSim, DeltaOneIsFrozen) {
  BranchingParams p = defaults(10);
  p.pmf1 = OffspringPmf::delta(1);
  p.pmf2 = OffspringPmf::delta(1);
  p.x0_count = 20;
  p.y0_count = 10;
  const auto rec = simulate_pair(p, 1.0, grid01(), {5, 0});
  EXPECT_GT(rec.event_count, 0u);
  for (std::size_t i = 0; i < rec.grid.size(); ++i) {
    EXPECT_EQ(rec.x[i], 2.0);
    EXPECT_EQ(rec.y[i], 1.0);
    EXPECT_EQ(rec.eta_hat[i], 0.0);
  }
  const auto d = martingale_diagnostics(rec, p);
  EXPECT_EQ(d.residual_x, 0.0);
}

TEST(BpSim, DeltaZeroPinnedAtBoundary) {
  BranchingParams p;
  p.n = 1;
  p.lambda1 = 1.5;
  p.pmf1 = OffspringPmf::delta(0);
  p.pmf2 = OffspringPmf::delta(1);
  p.x0_count = 1;
  p.y0_count = 0;
  const double T = 2.0;
  const auto rec = simulate_pair(p, T, std::vector<double>{0.0, 1.0, 2.0}, {9, 0});
  for (double x : rec.x) EXPECT_EQ(x, 1.0);
  EXPECT_EQ(rec.final_state.boundary_time, T);
  EXPECT_DOUBLE_EQ(rec.eta_hat.back(), p.lambda1 * T);
  const auto d = martingale_diagnostics(rec, p);
  EXPECT_NEAR(d.residual_x, 0.0, 1e-12);
  EXPECT_EQ(rec.final_state.z_int, 1 - static_cast<std::int64_t>(rec.event_count));
}

TEST(BpSim, InvariantsHoldOnEveryTransition) {
  const auto before = bp_invariant_counters();
  BpSimOptions opts;
  opts.event_log = true;
  for (std::uint64_t r = 0; r < 50; ++r) {
    auto p = defaults(20);
    p.y0_count = 3;
    const auto rec = simulate_pair(p, 2.0, grid01(), {3, r}, opts);
    bool absorbed = false;
    for (const auto& ev : rec.events) {
      ASSERT_GE(ev.x_int, p.n);
      if (ev.type == BpEventType::kReactant) ASSERT_FALSE(absorbed);
      if (ev.y_int == 0) absorbed = true;
      if (ev.type == BpEventType::kReplenish) ASSERT_EQ(ev.x_int, p.n);
    }
    for (std::size_t i = 1; i < rec.eta_hat.size(); ++i) ASSERT_GE(rec.eta_hat[i], rec.eta_hat[i - 1]);
    EXPECT_EQ(rec.eta_hat[0], 0.0);
  }
  const auto after = bp_invariant_counters();
  EXPECT_EQ(after.catalyst_below_boundary, before.catalyst_below_boundary);
  EXPECT_EQ(after.post_absorption_reactant_events, before.post_absorption_reactant_events);
  EXPECT_GT(after.transitions_checked, before.transitions_checked);
}

TEST(BpSim, DeterministicPerStream) {
  const auto p = defaults(20);
  const auto a = simulate_pair(p, 1.0, grid01(), {42, 7});
  const auto b = simulate_pair(p, 1.0, grid01(), {42, 7});
  const auto c = simulate_pair(p, 1.0, grid01(), {42, 8});
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.event_count, b.event_count);
  EXPECT_NE(a.event_count, c.event_count);
}

TEST(BpSim, GridIsRightContinuous) {
  BpSimOptions opts;
  opts.event_log = true;
  const auto p = defaults(5);
  const auto probe = simulate_pair(p, 1.0, grid01(), {1, 1}, opts);
  ASSERT_FALSE(probe.events.empty());
  const double t_event = probe.events.front().time;
  const auto rec = simulate_pair(p, 1.0, std::vector<double>{t_event}, {1, 1}, opts);
  EXPECT_EQ(rec.x[0], static_cast<double>(probe.events.front().x_int) / 5.0);
}

TEST(BpSim, Errors) {
  const auto p = defaults(20);
  EXPECT_THROW(simulate_pair(p, 0.0, grid01(), {1, 0}), std::invalid_argument);
  EXPECT_THROW(simulate_pair(p, 1.0, std::vector<double>{0.5, 0.2}, {1, 0}), std::invalid_argument);
  EXPECT_THROW(simulate_pair(p, 1.0, std::vector<double>{1.5}, {1, 0}), std::invalid_argument);
  EXPECT_THROW(martingale_diagnostics(simulate_pair(p, 1.0, grid01(), {1, 0}, {false, false, -1.0}), p),
               std::invalid_argument);
}

TEST(BpSim, MartingaleAndShadowMeansSmallSample) {
  const auto p = defaults(20);
  std::vector<double> res, qv, shadow;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    const auto rec = simulate_pair(p, 1.0, std::vector<double>{1.0}, {101, r});
    const auto d = martingale_diagnostics(rec, p);
    res.push_back(d.residual_x);
    qv.push_back(d.qv_rhs);
    shadow.push_back(d.shadow_residual);
  }
  const auto m = moments(res);
  EXPECT_LT(std::abs(m.mean), 4.0 * m.se_mean);
  const auto s = moments(shadow);
  EXPECT_LT(std::abs(s.mean), 4.0 * s.se_mean);
  const auto q = moments(qv);
  EXPECT_NEAR(m.variance / q.mean, 1.0, 0.15);
}

TEST(BpSim, AccelerationScalesCatalystOnly) {
  auto p = defaults(20);
  p.a_n = 8.0;
  BpSimOptions opts;
  opts.event_log = true;
  // Given the state before an event, it is a catalyst event with probability
  // a_n lambda1 n / (a_n lambda1 n + lambda2 y_int); the count must track the summed probabilities.
  double cat = 0.0, expected = 0.0, var = 0.0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto rec = simulate_pair(p, 0.5, std::vector<double>{0.5}, {2, r}, opts);
    std::int64_t y = p.y0_count;
    for (const auto& ev : rec.events) {
      const double rc = p.a_n * p.lambda1 * static_cast<double>(p.n);
      const double q = rc / (rc + p.lambda2 * static_cast<double>(y));
      expected += q;
      var += q * (1.0 - q);
      cat += ev.type != BpEventType::kReactant;
      y = ev.y_int;
    }
  }
  ASSERT_GT(var, 0.0);
  EXPECT_LT(std::abs(cat - expected), 4.0 * std::sqrt(var));
  EXPECT_GT(cat / expected, 0.97);
}

TEST(BpSim, WindowIntegralWithinRange) {
  const auto p = defaults(20);
  BpSimOptions opts;
  opts.window_start = 0.5;
  const auto rec = simulate_pair(p, 1.0, std::vector<double>{1.0}, {4, 0}, opts);
  ASSERT_TRUE(rec.integrals);
  EXPECT_GE(rec.integrals->window_x, 0.5);
  EXPECT_LE(rec.integrals->window_x, rec.integrals->int_x);
}

TEST(OccupationSampler, DeltaZeroStaysAtOne) {
  BranchingParams p;
  p.n = 1;
  p.pmf1 = OffspringPmf::delta(0);
  p.pmf2 = OffspringPmf::delta(1);
  p.x0_count = 1;
  const auto xs = occupation_sampler(p, 5.0, 1.0, 100, {1, 0});
  ASSERT_EQ(xs.size(), 100u);
  for (double x : xs) EXPECT_EQ(x, 1.0);
  EXPECT_THROW(occupation_sampler(p, 0.0, 1.0, 10, {1, 0}), std::invalid_argument);
}

TEST(BpCsv, GridAndEventHeaders) {
  const auto p = defaults(5);
  BpSimOptions opts;
  opts.event_log = true;
  std::vector<BpPathRecord> recs{simulate_pair(p, 0.2, std::vector<double>{0.0, 0.2}, {1, 0}, opts)};
  std::ostringstream g, e;
  write_bp_grid_csv(g, recs);
  write_bp_event_csv(e, recs[0]);
  EXPECT_EQ(g.str().substr(0, 16), "t,x,y,z,eta_hat\n");
  EXPECT_EQ(e.str().substr(0, 34), "time,event_type,k,x_int,y_int,z_in");
  recs.push_back(recs[0]);
  std::ostringstream g2;
  write_bp_grid_csv(g2, recs);
  EXPECT_EQ(g2.str().substr(0, 20), "rep,t,x,y,z,eta_hat\n");
}
