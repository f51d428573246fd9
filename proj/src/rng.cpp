#include "catbranch/rng.hpp"

namespace catbranch {

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW0;
      k[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
  return c;
}

PhiloxKey philox_key(std::uint64_t seed, StreamDomain domain) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32) ^ static_cast<std::uint32_t>(domain)};
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  for (auto t : tags) {
    state = h ^ (t + 0x632BE59BD9B4E019ull);
    h = splitmix64(state);
  }
  return h;
}

StreamEngine::StreamEngine(RngStream stream, StreamDomain domain) {
  const auto key = philox_key(stream.master_seed, domain);
  const PhiloxCounter ctr{static_cast<std::uint32_t>(stream.replication_index),
                          static_cast<std::uint32_t>(stream.replication_index >> 32), 0xFFFFFFFFu, 0xFFFFFFFFu};
  const auto block = philox4x32_10(ctr, key);
  std::uint64_t state = (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
  state ^= (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
  for (auto& w : s_) w = splitmix64(state);
}

}  // namespace catbranch
