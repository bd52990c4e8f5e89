#pragma once

#include <cstdint>

namespace uband {

// Counter-based random source. Every variate is a pure function of
// (seed, stream, index), so sampling is order-independent and safe to
// evaluate from any parallel schedule.

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t key_hash(std::uint64_t seed, std::uint64_t stream,
                              std::int64_t index) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ mix64(stream));
  h = mix64(h ^ mix64(static_cast<std::uint64_t>(index)));
  return h;
}

/// Uniform double in [0, 1) keyed by (seed, stream, index).
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::int64_t index) {
  return static_cast<double>(key_hash(seed, stream, index) >> 11) * 0x1.0p-53;
}

/// Derive an independent child seed, e.g. one per Monte-Carlo run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t child) {
  return mix64(mix64(seed) ^ mix64(child ^ 0xa5a5a5a5a5a5a5a5ULL));
}

}  // namespace uband
