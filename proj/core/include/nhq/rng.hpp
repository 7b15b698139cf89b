#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nhq/error.hpp"

namespace nhq {

// All randomness in the library flows from one user-supplied 64-bit seed.
// Independent consumers (graph build, per-vertex pool init, query routing,
// attribute generation, ...) derive their own sub-seed with splitmix64 so
// that adding a consumer never perturbs the draws of another, and so that
// per-vertex work can run on any number of threads with identical results.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
}

// Stream ids for the library's seed derivations. Fixed constants: renumbering
// them changes every build, so they are append-only.
enum class RngStream : uint64_t {
  AttributeGen = 1,
  QueryAttributeGen = 2,
  KgraphInit = 3,      // + vertex id
  KgraphQualitySample = 4,
  NswEntry = 5,
  SearchSeeds = 6,
  GraphQualitySample = 7,
  VectorGen = 8,
};

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed, RngStream stream, uint64_t lane = 0) {
  return Rng(derive_seed(seed, static_cast<uint64_t>(stream) + (lane << 8)));
}

// Uniform double in [0, 1) from the top 53 bits of one draw. Pinned here for
// the same reason as uniform_u32: std::uniform_real_distribution is not
// bit-portable across standard libraries.
inline double uniform_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased draw in [0, bound). std::uniform_int_distribution is not pinned
// across standard libraries, so results would not be portable; this rejection
// sampler is. bound must be > 0.
inline uint32_t uniform_u32(Rng& rng, uint32_t bound) {
  if (bound == 0) throw UsageError("uniform_u32: bound must be positive");
  const uint64_t b = bound;
  const uint64_t limit = UINT64_MAX - UINT64_MAX % b;
  uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<uint32_t>(x % b);
}

// k distinct values drawn uniformly from [0, n), in draw order.
// k >= n returns the full range 0..n-1.
inline std::vector<uint32_t> sample_distinct(Rng& rng, uint32_t k, uint32_t n) {
  std::vector<uint32_t> pool(n);
  for (uint32_t i = 0; i < n; ++i) pool[i] = i;
  if (k >= n) return pool;
  // Partial Fisher-Yates: the first k slots become the sample.
  for (uint32_t i = 0; i < k; ++i) {
    uint32_t j = i + uniform_u32(rng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace nhq
