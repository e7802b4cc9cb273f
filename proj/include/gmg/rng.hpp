// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_RNG_HPP
#define GMG_RNG_HPP

#include <cmath>
#include <cstdint>

namespace gmg
{

//
// SplitMix64 generator. The update and output mix are fully specified here so that every
// seeded state constructor is reproducible bit-for-bit across platforms:
//   state += 0x9E3779B97F4A7C15
//   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
//
class SplitMix64
{
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next()
  {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (one draw per call, the sine branch is discarded).
  double gaussian()
  {
    double u1 = uniform();
    while (u1 <= 0.0)
    {
      u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Independent child stream; used to give each consumer its own sequence.
  SplitMix64 split() { return SplitMix64(next()); }

private:
  std::uint64_t state_;
};

}  // namespace gmg

#endif  // GMG_RNG_HPP
