#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace graphgan {

// SplitMix64 step; used to derive independent seed streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic RNG for a (seed, path) pair. Distinct paths give
// independent streams, so per-root sampling stays reproducible no matter
// how work is scheduled across threads.
inline std::mt19937_64 stream_rng(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = seed;
  for (std::uint64_t p : path) {
    h ^= splitmix64(h) + p;
    (void)splitmix64(h);
  }
  return std::mt19937_64(splitmix64(h));
}

// Uniform double in [0, 1). Hand-rolled so results do not depend on the
// standard library's distribution implementation.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be > 0.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform_unit(rng) * static_cast<double>(n)) % n;
}

// Index drawn proportionally to probs (assumed to sum to ~1).
inline std::size_t pick_index(std::span<const double> probs, std::mt19937_64& rng) {
  double u = uniform_unit(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.empty() ? 0 : probs.size() - 1;
}

}  // namespace graphgan
