#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace ifor::detail {

/// Engine for the (stream, index) substream of a user seed. seed_seq
/// expansion is fully specified by the standard, so substreams are
/// reproducible across implementations.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index) {
  std::seed_seq seq{
      std::uint32_t(seed), std::uint32_t(seed >> 32),
      std::uint32_t(stream), std::uint32_t(stream >> 32),
      std::uint32_t(index), std::uint32_t(index >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double canonical(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

/// Box-Muller pair of independent standard normals. Pinned here (rather
/// than std::normal_distribution) so output streams are identical across
/// standard libraries.
inline std::pair<double, double> normal_pair(std::mt19937_64& rng) {
  double u1 = canonical(rng);
  const double u2 = canonical(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace ifor::detail
