// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace procscene {

// All randomness flows through an explicitly passed engine. The helpers below
// avoid std::*_distribution so streams are identical across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent child seed for stream `stream`, item `index`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index) {
  return splitmix64(splitmix64(base ^ splitmix64(stream)) + index);
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

/// Integer in [lo, hi], inclusive.
inline int uniform_int(Rng& rng, int lo, int hi) {
  if (hi <= lo) return lo;
  return lo + static_cast<int>(uniform_index(
                  rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Standard normal via Box-Muller (one value per call).
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace procscene
