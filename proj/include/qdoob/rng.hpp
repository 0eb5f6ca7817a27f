// Copyright 2026 The qdoob Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace qdoob {

/// SplitMix64 finalizer. Bijective on 64-bit integers.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic per-sample stream keyed by (seed, index).
///
/// Samples drawn from substream(seed, i) are independent of how many other
/// substreams exist and of the order in which they are consumed, which makes
/// parallel ensemble evaluation reproducible.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(mix64(mix64(seed) + index));
}

/// Uniform double in [0, 1) with 53-bit resolution.
///
/// The mapping from engine output to double is spelled out here (rather than
/// via std::uniform_real_distribution) so that streams are bit-identical
/// across standard library implementations.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

}  // namespace qdoob
