#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "catbranch/sde_sim.hpp"
#include "catbranch/simd/kernels.hpp"
#include "catbranch/stats.hpp"

using namespace catbranch;

namespace {

DiffusionParams base() { return DiffusionParams{-1.0, -0.5, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0}; }

}  // namespace

TEST(SdeGrid, ForHorizon) {
  const auto g = SdeGrid::for_horizon(1.0, 1e-3);
  EXPECT_EQ(g.steps, 1000u);
  EXPECT_THROW(SdeGrid::for_horizon(1.0, 0.3), std::invalid_argument);
  EXPECT_THROW(SdeGrid::for_horizon(1.0, 0.0), std::invalid_argument);
}

TEST(IntegrateSystem, ZeroNoiseMatchesReflectedOde) {
  const auto p = base();
  const double dt = 1e-3;
  const auto s = integrate_system(p, SdeGrid::for_horizon(2.0, dt), {1, 0}, {true});
  double worst = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i)
    worst = std::max(worst, std::abs(s.x[i] - std::max(2.0 * std::exp(-s.times[i]), 1.0)));
  EXPECT_LT(worst, 2.0 * dt);
}

TEST(IntegrateSystem, PinnedBoundaryDepositsDriftIntoEta) {
  auto p = base();
  p.x0 = 1.0;
  p.c1 = -1.5;
  p.lambda1 = 2.0;
  const double dt = 1.0 / 1024.0;
  const auto s = integrate_system(p, SdeGrid::for_horizon(1.0, dt), {1, 0}, {true});
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    EXPECT_EQ(s.x[i], 1.0);
    EXPECT_EQ(s.eta[i], 3.0 * static_cast<double>(i) * dt);
  }
}

TEST(IntegrateSystem, ZeroReactantIsAbsorbedFromStart) {
  auto p = base();
  p.y0 = 0.0;
  const auto s = integrate_system(p, SdeGrid::for_horizon(1.0, 1e-2), {3, 0});
  ASSERT_TRUE(s.absorbed_at);
  EXPECT_EQ(*s.absorbed_at, 0.0);
  for (double y : s.y) EXPECT_EQ(y, 0.0);
}

TEST(IntegrateSystem, InvariantsAndAbsorption) {
  auto p = base();
  p.y0 = 0.2;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto s = integrate_system(p, SdeGrid::for_horizon(3.0, 1e-3), {8, r});
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      ASSERT_GE(s.x[i], 1.0);
      ASSERT_GE(s.y[i], 0.0);
      if (i > 0) {
        const double inc = s.eta[i] - s.eta[i - 1];
        ASSERT_GE(inc, 0.0);
        ASSERT_NEAR(inc, s.x[i] - s.x_star[i], 1e-13 * (1.0 + s.eta[i])) << i;
        if (s.x_star[i] >= 1.0) ASSERT_EQ(inc, 0.0);
        if (inc > 0.0) ASSERT_EQ(s.x[i], 1.0);
      }
      if (s.absorbed_at && s.times[i] >= *s.absorbed_at) ASSERT_EQ(s.y[i], 0.0);
    }
  }
}

TEST(IntegrateSystem, ProjectionIsTheDiscreteSkorohodMap) {
  const auto p = base();
  const auto s = integrate_system(p, SdeGrid::for_horizon(5.0, 1e-3), {12, 0});
  Path psi;
  psi.times = s.times;
  psi.values.push_back(s.x[0]);
  for (std::size_t i = 1; i < s.times.size(); ++i) psi.values.push_back(psi.values.back() + (s.x_star[i] - s.x[i - 1]));
  const auto r = skorohod_reflect(psi);
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    ASSERT_NEAR(r.phi.values[i], s.x[i], 1e-9);
    ASSERT_NEAR(r.eta.values[i], s.eta[i], 1e-9);
  }
}

TEST(IntegrateSystem, BatchMatchesSinglePathBitwise) {
  auto p = base();
  p.a_n = 4.0;
  const auto grid = SdeGrid::for_horizon(1.0, 1e-3);
  const std::size_t reps = 37;
  for (auto isa : {simd::Isa::kScalar, simd::Isa::kAvx2}) {
    if (!simd::isa_supported(isa)) continue;
    simd::force_isa(isa);
    const auto batch = system_marginals(p, grid, 99, 5, reps, {}, 100);
    for (std::size_t i = 0; i < reps; ++i) {
      const auto s = integrate_system(p, grid, {99, 5 + i});
      EXPECT_EQ(std::bit_cast<std::uint64_t>(batch.x[i]), std::bit_cast<std::uint64_t>(s.x.back()));
      EXPECT_EQ(std::bit_cast<std::uint64_t>(batch.y[i]), std::bit_cast<std::uint64_t>(s.y.back()));
      EXPECT_EQ(std::bit_cast<std::uint64_t>(batch.eta[i]), std::bit_cast<std::uint64_t>(s.eta.back()));
      double sum = 0.0;
      for (std::size_t k = 900; k < 1000; ++k) sum += s.x[k];
      EXPECT_EQ(batch.window_mean_x[i], sum / 100.0);
    }
  }
  simd::force_isa(std::nullopt);
}

TEST(IntegrateSystem, NonFiniteStateAborts) {
  auto p = base();
  p.c1 = 1e306;
  EXPECT_THROW(integrate_system(p, SdeGrid::for_horizon(1.0, 0.5), {1, 0}), NonFiniteState);
  EXPECT_THROW(system_marginals(p, SdeGrid::for_horizon(1.0, 0.5), 1, 0, 8), NonFiniteState);
}

TEST(IntegrateSystem, CoupledNoiseDriver) {
  const auto p = base();
  std::vector<std::pair<double, double>> noise(100, {0.0, 0.0});
  const auto s = integrate_system_with_noise(p, 0.01, noise);
  const auto z = integrate_system(p, SdeGrid::for_horizon(1.0, 0.01), {1, 0}, {true});
  EXPECT_EQ(s.x, z.x);
  EXPECT_EQ(s.y, z.y);
}

TEST(IntegrateSystem, HalvingStepMovesMeanLessThanOneStandardError) {
  DiffusionParams p = base();
  p.x0 = 1.0;
  const double dt = 1e-3;
  const std::size_t steps = 1000, reps = 10000;
  std::mt19937_64 gen(12);
  std::normal_distribution<double> nd;
  std::vector<std::pair<double, double>> fine(steps), coarse(steps / 2);
  std::vector<double> x_fine, x_coarse;
  for (std::size_t r = 0; r < reps; ++r) {
    for (auto& e : fine) e = {nd(gen), nd(gen)};
    for (std::size_t k = 0; k < coarse.size(); ++k)
      coarse[k] = {(fine[2 * k].first + fine[2 * k + 1].first) / std::sqrt(2.0),
                   (fine[2 * k].second + fine[2 * k + 1].second) / std::sqrt(2.0)};
    x_fine.push_back(integrate_system_with_noise(p, dt, fine).x.back());
    x_coarse.push_back(integrate_system_with_noise(p, 2.0 * dt, coarse).x.back());
  }
  const auto mf = moments(x_fine), mc = moments(x_coarse);
  EXPECT_LT(std::abs(mf.mean - mc.mean), mf.se_mean) << mf.mean << " " << mc.mean;
}

TEST(IntegrateAveraged, TrivialAndMoments) {
  const auto zero = integrate_averaged(-0.5, 1.0, 0.0, SdeGrid::for_horizon(1.0, 1e-2), {1, 0});
  for (double y : zero.values) EXPECT_EQ(y, 0.0);
  const double b = -0.5 * 1.3837818999945846, a = 1.3837818999945846;
  const auto ys = averaged_marginals(b, a, 1.0, SdeGrid::for_horizon(1.0, 1e-3), 21, 0, 20000);
  const auto m = moments(ys);
  const double eb = std::exp(b);
  EXPECT_NEAR(m.mean, eb, 3.0 * m.se_mean);
  EXPECT_NEAR(m.variance, a * eb * (eb - 1.0) / b, 3.0 * m.se_variance);
  // The single-path integrator draws the same normals.
  const auto path = integrate_averaged(b, a, 1.0, SdeGrid::for_horizon(1.0, 1e-3), {21, 17});
  EXPECT_EQ(path.values.back(), ys[17]);
}

TEST(IntegrateSystem, ExponentialMomentStaysBounded) {
  const auto p = base();
  std::vector<double> e;
  for (double T : {1.0, 5.0, 25.0}) {
    const auto m = system_marginals(p, SdeGrid::for_horizon(T, 1e-2), 5, 0, 4000);
    double s = 0.0;
    for (double x : m.x) s += std::exp(0.1 * x);
    e.push_back(s / 4000.0);
  }
  EXPECT_LT(e[2], 1.5 * e[0]);
  EXPECT_LT(e[1], 1.5 * e[0]);
}

TEST(SdeCsv, Headers) {
  std::ostringstream os;
  write_sde_csv(os, integrate_system(base(), SdeGrid::for_horizon(1.0, 0.5), {1, 0}, {true}));
  EXPECT_EQ(os.str().substr(0, 9), "t,X,Y,eta");
  std::ostringstream av;
  write_averaged_csv(av, integrate_averaged(-1, 1, 1, SdeGrid::for_horizon(1.0, 0.5), {1, 0}));
  EXPECT_EQ(av.str().substr(0, 7), "t,Y_avg");
}
