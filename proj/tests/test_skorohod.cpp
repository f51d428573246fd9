#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "catbranch/skorohod.hpp"

using namespace catbranch;

namespace {

Path make(std::vector<double> t, std::vector<double> v, PathKind kind = PathKind::kPiecewiseLinear) {
  return Path{std::move(t), std::move(v), kind};
}

Path random_path(std::mt19937_64& gen, std::size_t nodes, PathKind kind) {
  std::normal_distribution<double> z(0.0, 0.5);
  std::uniform_real_distribution<double> u(1.0, 3.0);
  Path p;
  p.kind = kind;
  double v = u(gen);
  for (std::size_t i = 0; i < nodes; ++i) {
    p.times.push_back(0.01 * static_cast<double>(i));
    p.values.push_back(v);
    v += z(gen);
  }
  return p;
}

}  // namespace

TEST(Skorohod, ConstantAboveBoundary) {
  const auto r = skorohod_reflect(make({0, 1, 2, 3}, {2, 2, 2, 2}));
  EXPECT_EQ(r.phi.values, (std::vector<double>{2, 2, 2, 2}));
  EXPECT_EQ(r.eta.values, (std::vector<double>{0, 0, 0, 0}));
}

TEST(Skorohod, LinearDescent) {
  const auto r = skorohod_reflect(make({0, 1, 2, 3}, {2, 1, 0, -1}));
  EXPECT_EQ(r.phi.values, (std::vector<double>{2, 1, 1, 1}));
  EXPECT_EQ(r.eta.values, (std::vector<double>{0, 0, 1, 2}));
}

TEST(Skorohod, PastMinimumPersists) {
  const auto r = skorohod_reflect(make({0, 1, 2}, {1, 0, 1}));
  EXPECT_EQ(r.phi.values, (std::vector<double>{1, 1, 2}));
  EXPECT_EQ(r.eta.values, (std::vector<double>{0, 1, 1}));
}

TEST(Skorohod, RejectsInvalidInput) {
  EXPECT_THROW(skorohod_reflect(make({0, 1}, {0.5, 2})), InvalidPath);
  EXPECT_THROW(skorohod_reflect(make({0, 2, 1}, {1, 2, 3})), InvalidPath);
  EXPECT_THROW(skorohod_reflect(make({0.5, 1}, {1, 2})), InvalidPath);
  EXPECT_THROW(skorohod_reflect(make({0, 1}, {1})), InvalidPath);
}

TEST(Skorohod, CharacterizationAndIdempotence) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 500; ++trial) {
    const auto kind = trial % 2 ? PathKind::kPiecewiseConstant : PathKind::kPiecewiseLinear;
    const Path psi = random_path(gen, 200, kind);
    const auto r = skorohod_reflect(psi);
    EXPECT_EQ(r.eta.values[0], 0.0);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      ASSERT_GE(r.phi.values[i], 1.0);
      if (i > 0) {
        ASSERT_GE(r.eta.values[i], r.eta.values[i - 1]);
        if (r.eta.values[i] > r.eta.values[i - 1]) ASSERT_LE(r.phi.values[i], 1.0 + 1e-9);
      }
    }
    const auto again = skorohod_reflect(r.phi);
    EXPECT_EQ(again.phi.values, r.phi.values);
    for (double e : again.eta.values) EXPECT_EQ(e, 0.0);
  }
}

TEST(Skorohod, MonotoneInStartingShift) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 200; ++trial) {
    Path psi = random_path(gen, 100, PathKind::kPiecewiseLinear);
    Path shifted = psi;
    for (auto& v : shifted.values) v += 0.37;
    const auto a = skorohod_reflect(psi), b = skorohod_reflect(shifted);
    for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_GE(b.phi.values[i], a.phi.values[i] - 1e-12);
  }
}

TEST(Lipschitz, HandCases) {
  const Path a = make({0, 1, 2}, {2, 2, 2});
  const auto same = lipschitz_gap(a, a, 2.0);
  EXPECT_EQ(same.lhs, 0.0);
  EXPECT_EQ(same.rhs, 0.0);
  const auto g = lipschitz_gap(a, make({0, 1, 2}, {2.5, 2.5, 2.5}), 2.0);
  EXPECT_EQ(g.lhs, 0.5);
  EXPECT_EQ(g.rhs, 1.0);
  EXPECT_THROW(lipschitz_gap(a, make({0, 1.5, 2}, {2, 2, 2}), 2.0), std::invalid_argument);
}

TEST(Lipschitz, RandomPairs) {
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 2000; ++trial) {
    const Path a = random_path(gen, 50, PathKind::kPiecewiseLinear);
    Path b = random_path(gen, 50, PathKind::kPiecewiseLinear);
    const auto g = lipschitz_gap(a, b, 0.3);
    ASSERT_LE(g.lhs, g.rhs);
  }
}

TEST(SkorohodCsv, Headers) {
  std::ostringstream os;
  write_reflection_csv(os, skorohod_reflect(make({0, 1}, {1, 0})));
  EXPECT_EQ(os.str(), "time,phi,eta\n0,1,0\n1,1,1\n");
  std::ostringstream p;
  write_path_csv(p, make({0, 1}, {1, 0}));
  EXPECT_EQ(p.str(), "time,value\n0,1\n1,0\n");
}
