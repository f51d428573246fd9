#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "catbranch/format.hpp"
#include "catbranch/params.hpp"

using namespace catbranch;

namespace {

// Hand-summed reference: sum k mu(k) and sum (k-1)^2 mu(k), written out term by term.
OffspringMoments reference_moments(const std::vector<double>& p) {
  OffspringMoments m;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double kk = static_cast<double>(k);
    m.mean += kk * p[k];
    m.spread += (kk - 1.0) * (kk - 1.0) * p[k];
  }
  return m;
}

BranchingParams default_params() {
  BranchingParams p;
  p.n = 20;
  p.pmf1 = parse_pmf("0:0.3,1:0.45,2:0.25");
  p.pmf2 = p.pmf1;
  p.x0_count = 20;
  p.y0_count = 20;
  return p;
}

}  // namespace

TEST(OffspringPmf, RejectsBadEntries) {
  EXPECT_THROW(OffspringPmf({0.5, -0.1, 0.6}), std::invalid_argument);
  EXPECT_THROW(OffspringPmf({0.5, 0.4}), std::invalid_argument);
  EXPECT_THROW(OffspringPmf(std::vector<double>(OffspringPmf::kMaxSupport + 1, 1.0 / (OffspringPmf::kMaxSupport + 1))),
               std::invalid_argument);
  EXPECT_NO_THROW(OffspringPmf({0.5, 0.5 + 5e-13}));
}

TEST(OffspringPmf, ParsesSparseAndDense) {
  EXPECT_EQ(parse_pmf("0:0.3,1:0.45,2:0.25"), parse_pmf("0.3,0.45,0.25"));
  EXPECT_EQ(parse_pmf("2:1"), OffspringPmf::delta(2));
  EXPECT_THROW(parse_pmf("0:0.5,x:0.5"), std::invalid_argument);
}

TEST(OffspringMoments, DegenerateAndSymmetric) {
  const auto d = offspring_moments(OffspringPmf::delta(1));
  EXPECT_EQ(d.mean, 1.0);
  EXPECT_EQ(d.spread, 0.0);
  const auto s = offspring_moments(parse_pmf("0:0.5,2:0.5"));
  EXPECT_EQ(s.mean, 1.0);
  EXPECT_EQ(s.spread, 1.0);
}

TEST(OffspringMoments, DefaultPmfMatchesHandSum) {
  const auto ref = reference_moments({0.3, 0.45, 0.25});
  // 0*0.3 + 1*0.45 + 2*0.25 = 0.95 ; 1*0.3 + 0*0.45 + 1*0.25 = 0.55
  EXPECT_NEAR(ref.mean, 0.95, 1e-15);
  EXPECT_NEAR(ref.spread, 0.55, 1e-15);
  const auto m = offspring_moments(parse_pmf("0:0.3,1:0.45,2:0.25"));
  EXPECT_NEAR(m.mean, 0.95, 1e-15);
  EXPECT_NEAR(m.spread, 0.55, 1e-15);
}

TEST(OffspringMoments, SpreadZeroOnlyForDeltaOne) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(1 + trial % 6);
    double sum = 0.0;
    for (auto& v : p) sum += (v = u(gen));
    for (auto& v : p) v /= sum;
    const auto m = offspring_moments(OffspringPmf(p));
    const auto ref = reference_moments(p);
    EXPECT_NEAR(m.mean, ref.mean, 1e-12);
    EXPECT_GE(m.spread, 0.0);
    if (p.size() > 1) EXPECT_GT(m.spread, 0.0);
  }
  EXPECT_EQ(offspring_moments(OffspringPmf::delta(0)).spread, 1.0);
}

TEST(BranchingParams, CriticalityIdentity) {
  for (std::int64_t n : {1, 7, 20, 100, 1000}) {
    auto p = default_params();
    p.n = n;
    EXPECT_LT(std::abs(p.m1() - 1.0 - p.c1() / static_cast<double>(n)), 1e-12);
  }
}

TEST(Validate, DefaultsAreValidAndSubcritical) {
  const auto p = default_params();
  const auto r = validate(p, true);
  EXPECT_TRUE(r.ok()) << r.failures();
  EXPECT_NEAR(p.c1(), -1.0, 1e-12);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Validate, DeltaOneFailsOnAlpha) {
  auto p = default_params();
  p.pmf1 = OffspringPmf::delta(1);
  const auto r = validate(p, false);
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.failures().find("alpha1"), std::string::npos);
  EXPECT_THROW(require_valid(p, false), ValidationError);
}

TEST(Validate, SupercriticalFailsWhenRequired) {
  auto p = default_params();
  p.pmf1 = parse_pmf("0:0.2,1:0.5,2:0.3");  // mean 1.1
  EXPECT_TRUE(validate(p, false).ok());
  const auto r = validate(p, true);
  EXPECT_FALSE(r.ok());
  EXPECT_NEAR(p.c1(), 2.0, 1e-12);
  EXPECT_NE(r.failures().find("subcritical"), std::string::npos);
}

TEST(Validate, IdempotentAndPure) {
  const auto p = default_params();
  const auto a = validate(p, true);
  const auto b = validate(p, true);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].name, b.checks[i].name);
    EXPECT_EQ(a.checks[i].passed, b.checks[i].passed);
    EXPECT_EQ(a.checks[i].detail, b.checks[i].detail);
  }
}

TEST(Lattice, CountsMustBeIntegers) {
  EXPECT_EQ(lattice_count(1.5, 20, "x0"), 30);
  EXPECT_THROW(lattice_count(1.01, 20, "x0"), std::invalid_argument);
}

TEST(NearCritical, DefaultPmfIsTheFamilyAtTwenty) {
  const auto fam = OffspringPmf::near_critical(-1.0, 0.55, 20);
  const auto def = parse_pmf("0:0.3,1:0.45,2:0.25");
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(fam[k], def[k], 1e-15);
}

TEST(NearCritical, MemberReproducesLimitConstants) {
  const DiffusionParams limit{-1.0, -0.5, 0.55, 1.0, 2.0, 0.5, 2.0, 1.0, 1.0};
  for (std::int64_t n : {25, 50, 100}) {
    const auto bp = branching_member(limit, n);
    const auto d = diffusion_limit_of(bp);
    EXPECT_NEAR(d.c1, limit.c1, 1e-11);
    EXPECT_NEAR(d.c2, limit.c2, 1e-11);
    EXPECT_NEAR(d.alpha1, limit.alpha1, 1e-14);
    EXPECT_NEAR(d.alpha2, limit.alpha2, 1e-14);
    EXPECT_EQ(d.x0, 2.0);
    EXPECT_EQ(d.y0, 1.0);
  }
}

TEST(FamilyCheck, FixedPmfTailVanishesBeyondThreshold) {
  // K_max = 2, eps = 0.5: tails vanish once 0.5 sqrt(n) >= 2, i.e. n >= 16.
  std::vector<BranchingParams> fam;
  for (std::int64_t n : {4, 16, 64}) {
    auto p = default_params();
    p.n = n;
    p.x0_count = n;
    p.y0_count = n;
    fam.push_back(p);
  }
  const auto rep = family_check(fam, 0.5);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_GT(rep.rows[0].tail1, 0.0);
  EXPECT_EQ(rep.rows[1].tail1, 0.0);
  EXPECT_EQ(rep.rows[2].tail1, 0.0);
  EXPECT_TRUE(rep.has_trend);
  EXPECT_TRUE(rep.tails_vanishing);
}

TEST(FamilyCheck, SingleRowHasNoTrend) {
  const auto rep = family_check({default_params()}, 0.5);
  EXPECT_EQ(rep.rows.size(), 1u);
  EXPECT_FALSE(rep.has_trend);
  EXPECT_THROW(family_check({}, 0.5), std::invalid_argument);
}

TEST(FamilyCheck, GeometricTailByDirectSummation) {
  // Truncated geometric law mu(k) ~ q^k, k <= 40, summed independently here.
  const double q = 0.5;
  std::vector<double> p(41);
  double z = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) z += (p[k] = std::pow(q, static_cast<double>(k)));
  for (auto& v : p) v /= z;
  double mean = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) mean += static_cast<double>(k) * p[k];
  std::vector<BranchingParams> fam;
  for (std::int64_t n : {16, 64, 256}) {
    auto bp = default_params();
    bp.n = n;
    bp.x0_count = n;
    bp.y0_count = n;
    bp.pmf1 = OffspringPmf(p);
    fam.push_back(bp);
  }
  const auto rep = family_check(fam, 1.0);
  for (const auto& row : rep.rows) {
    double ref = 0.0;
    const double thr = std::sqrt(static_cast<double>(row.n));
    for (std::size_t l = 0; l < p.size(); ++l)
      if (static_cast<double>(l) > thr) ref += (static_cast<double>(l) - mean) * (static_cast<double>(l) - mean) * p[l];
    EXPECT_NEAR(row.tail1, ref, 1e-15);
  }
  EXPECT_TRUE(rep.tails_vanishing);
}

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) EXPECT_EQ(parse_double(format_double(v), "v"), v);
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_THROW(parse_double("1.5x", "v"), std::invalid_argument);
  EXPECT_THROW(parse_int("", "v"), std::invalid_argument);
}
