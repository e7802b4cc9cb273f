// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_BF16_HPP
#define GMG_BF16_HPP

#include <bit>
#include <cstdint>

#include "gmg/common.hpp"

namespace gmg
{

// Unit roundoff of an 8-bit significand (1 + 8 + 7 format).
inline constexpr double kEpsBF16 = 0x1.0p-8;

// Nearest bfloat16 value of a single-precision number, ties to even. NaN and inf pass
// through unchanged; the result is again a float with the low 16 bits cleared.
inline float round_bf16(float x)
{
  std::uint32_t bits = std::bit_cast<std::uint32_t>(x);
  if ((bits & 0x7F800000u) == 0x7F800000u)
  {
    return x;
  }
  const std::uint32_t lsb = (bits >> 16) & 1u;
  bits += 0x7FFFu + lsb;
  bits &= 0xFFFF0000u;
  return std::bit_cast<float>(bits);
}

// Double inputs are first cast to FP32, as the reduced-precision paths do before
// down-casting.
inline double round_bf16(double x)
{
  return static_cast<double>(round_bf16(static_cast<float>(x)));
}

template <typename Derived>
void round_bf16_inplace(Eigen::MatrixBase<Derived> &x)
{
  using Scalar = typename Derived::Scalar;
  for (Index i = 0; i < x.size(); i++)
  {
    x.derived().data()[i] = static_cast<Scalar>(round_bf16(static_cast<float>(x.derived().data()[i])));
  }
}

}  // namespace gmg

#endif  // GMG_BF16_HPP
