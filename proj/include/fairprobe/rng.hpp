#pragma once

#include <cstdint>
#include <string_view>

#include "fairprobe/stats.hpp"

namespace fairprobe {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// FNV-1a accumulator for deriving independent RNG streams from a master seed
// plus the identifying context (combination encoding, gender, kind, set
// index, ...). Stream layout is part of the artifact's determinism contract.
struct SeedChain {
  std::uint64_t h = 1469598103934665603ull;

  SeedChain& add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
    return *this;
  }
  SeedChain& add(std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return *this;
  }
  std::uint64_t digest() const { return mix64(h); }
};

// SplitMix64 stream. Cheap, seedable from a single word, and identical on
// every platform, unlike the standard distributions.
struct RngStream {
  std::uint64_t state;

  explicit RngStream(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in (0,1), never exactly 0 or 1.
  double next_unit() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (~n + 1) % n;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  double normal() { return norm_ppf(next_unit()); }
};

// One-shot draws keyed by a counter; used where values must not depend on
// evaluation order (parallel generation).
inline double keyed_unit(std::uint64_t key) {
  return (double(mix64(key) >> 11) + 0.5) * 0x1.0p-53;
}
inline double keyed_normal(std::uint64_t key) { return norm_ppf(keyed_unit(key)); }

}  // namespace fairprobe
