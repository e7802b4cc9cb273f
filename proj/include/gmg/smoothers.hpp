// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_SMOOTHERS_HPP
#define GMG_SMOOTHERS_HPP

#include <cmath>
#include <cstdint>

#include "gmg/common.hpp"
#include "gmg/operator.hpp"

namespace gmg
{

enum class SmootherKind
{
  Chebyshev,
  Jacobi
};

std::string_view to_string(SmootherKind kind);
SmootherKind parse_smoother_kind(std::string_view name);

inline constexpr double kDefaultLowerFraction = 1.0 / 30.0;
inline constexpr double kJacobiDampingCap = 0.5;
inline constexpr double kLambdaFloor = 1e-6;

struct SmootherConfig
{
  SmootherKind kind = SmootherKind::Chebyshev;
  int degree = 2;                        // Chebyshev degree or Jacobi sweeps on the fine level
  double alpha = kDefaultLowerFraction;  // band [alpha lambda_max, lambda_max]
  double omega = kJacobiDampingCap;      // Jacobi damping
  int coarse_steps = 2;                  // degree / sweeps on assembled levels

  void validate() const;
};

// 1 / T_nu((1 + alpha) / (1 - alpha)), the residual-polynomial bound on the target band.
double chebyshev_band_bound(int nu, double alpha);

//
// Power iteration on D^{-1} K from a seeded random start. The estimate is the Rayleigh
// quotient x^T K x / x^T D x at the final iterate, floored at 1e-6.
//
double estimate_lambda_max(const LinearOperator &K, const Vector &diag_inv, int iters,
                           std::uint64_t seed);

//
// Degree-nu Chebyshev semi-iteration on D^{-1} K targeting [alpha lambda_max, lambda_max].
// With theta = (1 + alpha) lambda_max / 2 and delta = (1 - alpha) lambda_max / 2:
//   d_0 = D^{-1}(b - K x_0) / theta,  x_1 = x_0 + d_0,  a_0 = 2 / theta
//   a_k = 1 / (theta - delta^2 a_{k-1} / 4)
//   d_k = a_k (D^{-1} r_k + (delta^2 a_{k-1} / 4) d_{k-1}),  x_{k+1} = x_k + d_k
// FP32 runs the whole recurrence in single precision; BF16EMU does the same with the
// operator inputs and coefficients rounded to bfloat16 inside each matvec.
//
Vector chebyshev_smooth(const LinearOperator &K, const Vector &b, const Vector &x0,
                        const Vector &diag_inv, double lambda_max, int nu, double alpha,
                        PrecisionTag prec = PrecisionTag::FP64);

// x <- x + omega D^{-1} (b - K x), `steps` times.
Vector jacobi_smooth(const LinearOperator &K, const Vector &b, const Vector &x0,
                     const Vector &diag_inv, double omega, int steps,
                     PrecisionTag prec = PrecisionTag::FP64);

}  // namespace gmg

#endif  // GMG_SMOOTHERS_HPP
