// SPDX-License-Identifier: Apache-2.0

#include "gmg/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gmg/rng.hpp"

namespace gmg
{

namespace
{

// Lanczos in the inner product <x, y> = x^T G y. With apply_G null, G = I.
SpectralProbe lanczos(const ApplyFn &apply_M, const ApplyFn *apply_G, Index n, int m,
                      std::uint64_t seed)
{
  if (m < 2)
  {
    throw std::invalid_argument("Lanczos needs at least two steps");
  }
  SpectralProbe probe;
  probe.m = m;
  probe.seed = seed;
  const int steps = static_cast<int>(std::min<Index>(m, n));

  auto gram = [&](const Vector &x, Vector &Gx) {
    if (apply_G)
    {
      (*apply_G)(x, Gx);
    }
    else
    {
      Gx = x;
    }
  };

  SplitMix64 rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; i++)
  {
    v[i] = rng.gaussian();
  }
  Vector Gv(n);
  gram(v, Gv);
  const double norm0 = std::sqrt(v.dot(Gv));
  v /= norm0;
  Gv /= norm0;

  std::vector<Vector> V{v}, GV{Gv};
  std::vector<double> alpha, beta;
  Vector w(n), Gw(n);
  for (int j = 0; j < steps; j++)
  {
    // w = M G v_j: with G = K this is the preconditioned operator applied to v_j.
    apply_M(GV[j], w);
    gram(w, Gw);
    double a = 0.0;
    // Two passes of modified Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; pass++)
    {
      for (int i = 0; i <= j; i++)
      {
        const double c = w.dot(GV[i]);
        w -= c * V[i];
        if (i == j)
        {
          a += c;
        }
      }
    }
    // Recomputed rather than updated: after heavy cancellation an updated G w no longer
    // matches w.
    gram(w, Gw);
    alpha.push_back(a);
    probe.steps = j + 1;
    const double bsq = w.dot(Gw);
    const double b = bsq > 0.0 ? std::sqrt(bsq) : 0.0;
    double scale = 0.0;
    for (double x : alpha)
    {
      scale = std::max(scale, std::abs(x));
    }
    if (j + 1 == steps)
    {
      break;
    }
    if (!(b > 1e-12 * scale))
    {
      probe.partial = true;
      break;
    }
    beta.push_back(b);
    V.push_back(w / b);
    GV.push_back(Gw / b);
  }

  const int k = static_cast<int>(alpha.size());
  DenseMatrix T = DenseMatrix::Zero(k, k);
  for (int i = 0; i < k; i++)
  {
    T(i, i) = alpha[i];
    if (i + 1 < k)
    {
      T(i, i + 1) = T(i + 1, i) = beta[i];
    }
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(T, Eigen::EigenvaluesOnly);
  probe.ritz_min = eig.eigenvalues().minCoeff();
  probe.ritz_max = eig.eigenvalues().maxCoeff();
  probe.valid = probe.ritz_min > 0.0;
  probe.kappa_eff =
    probe.valid ? probe.ritz_max / probe.ritz_min : std::numeric_limits<double>::infinity();
  probe.eps_kappa = kEpsBF16 * probe.kappa_eff;
  return probe;
}

}  // namespace

SpectralProbe lanczos_kappa_eff(const ApplyFn &apply_M, const ApplyFn &apply_K, Index n, int m,
                                std::uint64_t seed)
{
  return lanczos(apply_M, &apply_K, n, m, seed);
}

SpectralProbe lanczos_kappa_eff(const ApplyFn &apply_MK, Index n, int m, std::uint64_t seed)
{
  return lanczos(apply_MK, nullptr, n, m, seed);
}

double kappa_bound(double rho)
{
  if (!(rho >= 0.0 && rho < 1.0))
  {
    throw std::invalid_argument("kappa bound needs 0 <= rho < 1");
  }
  return (1.0 + rho) / (1.0 - rho);
}

}  // namespace gmg
