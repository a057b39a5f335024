#pragma once

#include <cstdint>

#include "chaoslab/numeric.hpp"

namespace chaoslab {

// Counter-based Gaussian stream.  Every draw is a pure function of
// (seed, stream_id, index): a splitmix64-style keyed hash produces the
// uniform, the normal quantile maps it to a Gaussian.  Draws can therefore
// be produced in any order, by any number of workers, with identical output.
namespace rng_detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace rng_detail

struct GaussianStream {
  std::uint64_t key;  // mixed (seed, stream_id) pair

  GaussianStream(std::uint64_t seed, std::uint64_t stream_id)
      : key(rng_detail::mix64(seed + rng_detail::kGolden) ^
            rng_detail::mix64(stream_id * 0xA24BAED4963EE407ULL + 1)) {}

  std::uint64_t bits_at(std::uint64_t index) const {
    return rng_detail::mix64(key + rng_detail::kGolden * (index + 1));
  }

  // Open-interval uniform: 53 significant bits, offset so 0 and 1 are
  // unreachable.
  double uniform_at(std::uint64_t index) const {
    return static_cast<double>(bits_at(index) >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double normal_at(std::uint64_t index) const {
    return normal_quantile(uniform_at(index));
  }
};

}  // namespace chaoslab
