#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "catbranch/rng.hpp"

using namespace catbranch;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Uniform, OpenIntervalEndpoints) {
  EXPECT_GT(uniform_open(0), 0.0);
  EXPECT_LT(uniform_open(~0ull), 1.0);
  EXPECT_EQ(uniform_open(0), 0.5 * 0x1.0p-52);
}

TEST(Keys, DomainsSeparate) {
  std::set<PhiloxKey> keys;
  for (auto d : {StreamDomain::kBranching, StreamDomain::kDiffusion, StreamDomain::kAveraged, StreamDomain::kStationary})
    keys.insert(philox_key(42, d));
  EXPECT_EQ(keys.size(), 4u);
}

TEST(DeriveSeed, DependsOnEveryTag) {
  const auto a = derive_seed(1, {2, 3});
  EXPECT_EQ(a, derive_seed(1, {2, 3}));
  EXPECT_NE(a, derive_seed(1, {3, 2}));
  EXPECT_NE(a, derive_seed(2, {2, 3}));
  EXPECT_NE(a, derive_seed(1, {2, 3, 0}));
}

TEST(StreamEngine, ReproducibleAndDistinct) {
  StreamEngine a({7, 0}, StreamDomain::kBranching), b({7, 0}, StreamDomain::kBranching),
      c({7, 1}, StreamDomain::kBranching);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs |= x != c();
  }
  EXPECT_TRUE(differs);
}

TEST(StreamEngine, UniformMoments) {
  StreamEngine e({11, 3}, StreamDomain::kStationary);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = e.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(s2 / n, 1.0 / 3.0, 5e-3);
}
