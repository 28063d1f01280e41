#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace edgefuse::detail {

// Deterministic generator with explicit arithmetic so fixed seeds reproduce
// byte-identical results on any compiler or standard library.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased draw from [0, n) by rejection.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline void shuffle_indices(std::vector<int>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.bounded(i)]);
}

// Stream decorrelation for per-seed generators.
inline SplitMix64 seeded_stream(std::uint64_t seed) {
  return SplitMix64(seed * 0x9e3779b97f4a7c15ull + 0x5851f42d4c957f2dull);
}

}  // namespace edgefuse::detail
