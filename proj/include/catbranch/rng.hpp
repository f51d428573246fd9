#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace catbranch {

/// Identifies one replication's random stream. Identical streams give identical draws.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t replication_index = 0;
};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

/// Philox4x32 with 10 rounds (Salmon et al. counter-based generator).
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// Stream domains keep the generators of different subsystems disjoint under one seed.
enum class StreamDomain : std::uint32_t {
  kBranching = 0x42500001u,
  kDiffusion = 0x53444501u,
  kAveraged = 0x41564701u,
  kStationary = 0x53544101u,
};

PhiloxKey philox_key(std::uint64_t seed, StreamDomain domain);

std::uint64_t splitmix64(std::uint64_t& state);

/// Hash-combines a seed with tags (repeat index, sweep index, ...) into a child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

/// Maps the top 52 of 64 random bits to the open interval (0, 1).
inline double uniform_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// xoshiro256++ seeded from a Philox block of the stream; satisfies UniformRandomBitGenerator.
class StreamEngine {
 public:
  using result_type = std::uint64_t;

  StreamEngine(RngStream stream, StreamDomain domain);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform() { return uniform_open((*this)()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace catbranch
