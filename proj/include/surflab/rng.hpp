#pragma once
#include <cstdint>
#include <random>
#include <vector>

namespace surflab {

using Rng = std::mt19937_64;

// splitmix64; used to whiten seeds and to hash integer keys into uniforms.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// RNG for (seed, stream); replica k of an experiment uses stream k so chains
/// are reproducible independently of thread scheduling.
inline Rng make_rng(uint64_t seed, uint64_t stream = 0) {
  return Rng(splitmix64(splitmix64(seed) ^ (0x632be59bd9b4e019ULL + stream)));
}

/// Deterministic uniform in [0,1) keyed by an integer tuple. The same key gives
/// the same value under one seed regardless of evaluation order; this is how
/// one resistance sample is shared consistently across nested boxes.
inline double key_uniform(uint64_t seed, const std::vector<int64_t>& key) {
  uint64_t h = splitmix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
  for (int64_t k : key) h = splitmix64(h ^ static_cast<uint64_t>(k));
  h = splitmix64(h);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace surflab
