#pragma once
// Deterministic PRNG for generators and samplers.  splitmix64 produces the
// same stream on every platform; <random> distributions do not, and the
// artifact promises byte-identical outputs for a fixed seed.

#include <cstdint>

namespace tg {

class splitmix64 {
 public:
  explicit splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound), bound > 0, by rejection sampling.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = ~0ULL - ~0ULL % bound;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % bound;
  }

  // Uniform in [lo, hi] inclusive.
  std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi) {
    return lo + next_below(hi - lo + 1);
  }

 private:
  std::uint64_t state_;
};

}  // namespace tg
