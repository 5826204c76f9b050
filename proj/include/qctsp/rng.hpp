// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_RNG_HPP
#define QCTSP_RNG_HPP

#include <cstdint>
#include <random>

namespace qctsp {

// Seed mixing and uniform draws are hand-rolled so that a given seed
// produces the same stream on every platform; std::uniform_*_distribution
// is implementation-defined and would break byte-identical result files.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic stream id for (base seed, run id, stage tag) triples.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64(splitmix64(base ^ 0x243f6a8885a308d3ULL) ^
                    splitmix64(a ^ 0x13198a2e03707344ULL) ^
                    splitmix64(b ^ 0xa4093822299f31d0ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection keeps the draw unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace qctsp

#endif  // QCTSP_RNG_HPP
