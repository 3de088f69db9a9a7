#pragma once

#include <cstdint>

// Counter-based deterministic randomness. Every "random" choice in the
// workbench (inputs, pivots, sources, weights) flows through these so a
// (seed, config) pair reproduces a run bit-for-bit on any platform.
namespace wem {

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(mix64(seed ^ 0x853c49e6748fea9bull)) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) without modulo bias (Lemire reduction).
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Distinct pseudo-random 31-bit keys: a fixed 4-round Feistel permutation
// over [0, 2^30). key_at(i) != key_at(j) for i != j, so bulk key streams
// need no dedup bookkeeping. Top bit stays clear; callers can use it to
// build a disjoint miss-key range.
class KeyPermutation {
 public:
  explicit KeyPermutation(uint64_t seed) {
    for (int r = 0; r < 4; ++r) round_[r] = mix64(seed + 0x5151ull * (r + 1));
  }

  uint32_t key_at(uint32_t i) const {
    uint32_t l = i >> 15, r = i & 0x7fff;
    for (int k = 0; k < 4; ++k) {
      uint32_t f = static_cast<uint32_t>(mix64(r ^ round_[k])) & 0x7fff;
      uint32_t nl = r;
      r = l ^ f;
      l = nl;
    }
    return (l << 15) | r;  // < 2^30
  }

 private:
  uint64_t round_[4];
};

}  // namespace wem
