// SPDX-License-Identifier: Apache-2.0

#include "gmg/smoothers.hpp"

#include <algorithm>

#include "gmg/rng.hpp"

namespace gmg
{

std::string_view to_string(SmootherKind kind)
{
  return kind == SmootherKind::Chebyshev ? "chebyshev" : "jacobi";
}

SmootherKind parse_smoother_kind(std::string_view name)
{
  if (name == "chebyshev")
  {
    return SmootherKind::Chebyshev;
  }
  if (name == "jacobi")
  {
    return SmootherKind::Jacobi;
  }
  throw std::invalid_argument("unknown smoother: " + std::string(name));
}

void SmootherConfig::validate() const
{
  if (degree < 1 || coarse_steps < 1)
  {
    throw std::invalid_argument("smoother degree must be at least 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0))
  {
    throw std::invalid_argument("Chebyshev lower fraction must lie in (0, 1)");
  }
  if (!(omega > 0.0 && omega <= kJacobiDampingCap))
  {
    throw std::invalid_argument("Jacobi damping must lie in (0, 0.5]");
  }
}

double chebyshev_band_bound(int nu, double alpha)
{
  if (nu < 1 || !(alpha > 0.0 && alpha < 1.0))
  {
    throw std::invalid_argument("band bound needs nu >= 1 and 0 < alpha < 1");
  }
  const double x = (1.0 + alpha) / (1.0 - alpha);
  return 1.0 / std::cosh(nu * std::acosh(x));
}

double estimate_lambda_max(const LinearOperator &K, const Vector &diag_inv, int iters,
                           std::uint64_t seed)
{
  if (iters < 1)
  {
    throw std::invalid_argument("power iteration needs at least one step");
  }
  const Index n = K.size();
  SplitMix64 rng(seed);
  Vector x(n);
  for (Index i = 0; i < n; i++)
  {
    x[i] = 2.0 * rng.uniform() - 1.0;
  }
  x.normalize();
  Vector Kx(n);
  double lambda = 0.0;
  for (int it = 0; it < iters; it++)
  {
    K.apply(x, Kx);
    const double xDx = x.dot(x.cwiseQuotient(diag_inv));
    lambda = x.dot(Kx) / xDx;
    x = diag_inv.cwiseProduct(Kx);
    const double norm = x.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
    {
      break;
    }
    x /= norm;
  }
  return std::max(lambda, kLambdaFloor);
}

namespace
{

template <typename Scalar>
void apply_at(const LinearOperator &K, const VectorX<Scalar> &x, VectorX<Scalar> &y,
              PrecisionTag prec)
{
  if constexpr (std::is_same_v<Scalar, double>)
  {
    K.apply(x, y);
  }
  else
  {
    K.apply(x, y, prec);
  }
}

template <typename Scalar>
VectorX<Scalar> chebyshev_impl(const LinearOperator &K, const VectorX<Scalar> &b,
                               const VectorX<Scalar> &x0, const VectorX<Scalar> &diag_inv,
                               double lambda_max, int nu, double alpha, PrecisionTag prec)
{
  const Scalar theta = static_cast<Scalar>(0.5 * (lambda_max + alpha * lambda_max));
  const Scalar delta = static_cast<Scalar>(0.5 * (lambda_max - alpha * lambda_max));
  const Scalar quarter_delta2 = delta * delta / Scalar(4);

  VectorX<Scalar> x = x0;
  VectorX<Scalar> r(b.size());
  apply_at(K, x, r, prec);
  r = b - r;
  VectorX<Scalar> d = diag_inv.cwiseProduct(r) / theta;
  x += d;
  Scalar a_prev = Scalar(2) / theta;
  for (int k = 1; k < nu; k++)
  {
    apply_at(K, x, r, prec);
    r = b - r;
    const Scalar a = Scalar(1) / (theta - quarter_delta2 * a_prev);
    d = a * (diag_inv.cwiseProduct(r) + (quarter_delta2 * a_prev) * d);
    x += d;
    a_prev = a;
  }
  return x;
}

template <typename Scalar>
VectorX<Scalar> jacobi_impl(const LinearOperator &K, const VectorX<Scalar> &b,
                            const VectorX<Scalar> &x0, const VectorX<Scalar> &diag_inv,
                            double omega, int steps, PrecisionTag prec)
{
  VectorX<Scalar> x = x0;
  VectorX<Scalar> r(b.size());
  const Scalar w = static_cast<Scalar>(omega);
  for (int s = 0; s < steps; s++)
  {
    apply_at(K, x, r, prec);
    x += w * diag_inv.cwiseProduct(b - r);
  }
  return x;
}

void check_sizes(const LinearOperator &K, const Vector &b, const Vector &x0, const Vector &dinv)
{
  if (b.size() != K.size() || x0.size() != K.size() || dinv.size() != K.size())
  {
    throw std::invalid_argument("smoother: vector length does not match operator");
  }
}

}  // namespace

Vector chebyshev_smooth(const LinearOperator &K, const Vector &b, const Vector &x0,
                        const Vector &diag_inv, double lambda_max, int nu, double alpha,
                        PrecisionTag prec)
{
  if (!(lambda_max > 0.0))
  {
    throw std::invalid_argument("Chebyshev smoother needs a positive lambda_max");
  }
  if (nu < 1)
  {
    throw std::invalid_argument("Chebyshev degree must be at least 1");
  }
  check_sizes(K, b, x0, diag_inv);
  if (prec == PrecisionTag::FP64)
  {
    return chebyshev_impl<double>(K, b, x0, diag_inv, lambda_max, nu, alpha, prec);
  }
  // D^{-1} is kept in FP64 and cast to FP32 at use.
  const VectorF xf = chebyshev_impl<float>(K, b.cast<float>(), x0.cast<float>(),
                                           diag_inv.cast<float>(), lambda_max, nu, alpha, prec);
  return xf.cast<double>();
}

Vector jacobi_smooth(const LinearOperator &K, const Vector &b, const Vector &x0,
                     const Vector &diag_inv, double omega, int steps, PrecisionTag prec)
{
  if (!(omega > 0.0 && omega <= kJacobiDampingCap))
  {
    throw std::invalid_argument("Jacobi damping must lie in (0, 0.5]");
  }
  check_sizes(K, b, x0, diag_inv);
  if (prec == PrecisionTag::FP64)
  {
    return jacobi_impl<double>(K, b, x0, diag_inv, omega, steps, prec);
  }
  const VectorF xf = jacobi_impl<float>(K, b.cast<float>(), x0.cast<float>(),
                                        diag_inv.cast<float>(), omega, steps, prec);
  return xf.cast<double>();
}

}  // namespace gmg
