#pragma once
// Portable seeded random numbers.
//
// Generator: xoshiro256** (Blackman & Vigna). State is filled from SplitMix64,
// whose initial value is
//
//     mix64(seed) ^ mix64(stream ^ 0x6A09E667F3BCC909)
//
// where mix64 is the SplitMix64 output finalizer. Each independent consumer
// (one simulated user, one random walk, one training run) owns its own
// stream id, so results do not depend on scheduling or iteration order.
// uniform() takes the top 53 bits of the next output, so the double sequence
// is identical on any IEEE-754 platform and reproducible in other languages.

#include <array>
#include <cstdint>
#include <string_view>

namespace nudgesim {

std::uint64_t mix64(std::uint64_t x);

// FNV-1a 64-bit; used to derive a stream id from a user id.
std::uint64_t stream_id(std::string_view key);

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace nudgesim
