#pragma once

#include <cstdint>
#include <random>

namespace cafewall::detail {

/// Uniform integer in [lo, hi] by rejection on raw mt19937_64 output. Unlike
/// std::uniform_int_distribution the sequence is identical on every standard library.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1u;
  if (span == 0) return lo + static_cast<std::int64_t>(rng());  // full 64-bit range
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span + 1u) % span;
  std::uint64_t draw = rng();
  while (draw > limit) draw = rng();
  return lo + static_cast<std::int64_t>(draw % span);
}

}  // namespace cafewall::detail
