// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace polylab {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the output is a pure function of (key, counter, stream).
constexpr std::uint64_t hash3(std::uint64_t key, std::uint64_t counter, std::uint64_t stream) {
  return mix64(mix64(key ^ mix64(stream * 0xd1342543de82ef95ULL)) ^ counter);
}

// Uniform on the open interval (0,1), 53 bits.
constexpr double to_open_unit(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

inline double counter_uniform(std::uint64_t key, std::int64_t counter, std::uint64_t stream) {
  return to_open_unit(hash3(key, static_cast<std::uint64_t>(counter), stream));
}

// Box-Muller on two independent counter streams.
inline double counter_normal(std::uint64_t key, std::int64_t counter, std::uint64_t stream) {
  double u1 = counter_uniform(key, counter, 2 * stream);
  double u2 = counter_uniform(key, counter, 2 * stream + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Child seed for replicate `index` of a batch rooted at `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace polylab
