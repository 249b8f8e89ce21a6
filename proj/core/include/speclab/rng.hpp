#pragma once

#include <cstdint>

namespace speclab {

// Project-wide RNG: xoshiro256** seeded through splitmix64. Fixed choice so
// that every artifact written by the tools is reproducible from its seed
// alone, independent of platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; no state beyond the uniform stream, so
  // the draw sequence is fully determined by the seed.
  double normal();

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Derives a per-task seed from a master seed and two indices (e.g. the
// position in an n-list and a repetition index). Execution order of parallel
// workers therefore cannot change any result.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a,
                              std::uint64_t b) {
  std::uint64_t x = master;
  x ^= 0x9e3779b97f4a7c15ULL + (a << 1);
  Rng::splitmix64(x);
  x ^= 0xc2b2ae3d27d4eb4fULL + (b << 1);
  std::uint64_t y = x;
  return Rng::splitmix64(y);
}

}  // namespace speclab
