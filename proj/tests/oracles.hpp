// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations. Nothing here calls into the library code paths it
// is used to check.

#ifndef GMG_TESTS_ORACLES_HPP
#define GMG_TESTS_ORACLES_HPP

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "gmg/mesh.hpp"
#include "gmg/rng.hpp"

namespace oracle
{

using gmg::DenseMatrix;
using gmg::Index;
using gmg::Vector;

// Element stiffness from the tensor form lambda div u div v + mu (grad u : grad v +
// grad u : grad v^T), integrated with 3-point Gauss-Legendre per axis.
inline Eigen::Matrix<double, 24, 24> element_stiffness(double nu)
{
  const double lambda = nu / ((1 + nu) * (1 - 2 * nu));
  const double mu = 1.0 / (2 * (1 + nu));
  const double gp[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
  const double gw[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
  Eigen::Matrix<double, 24, 24> K = Eigen::Matrix<double, 24, 24>::Zero();
  for (int qx = 0; qx < 3; qx++)
  {
    for (int qy = 0; qy < 3; qy++)
    {
      for (int qz = 0; qz < 3; qz++)
      {
        const double X[3] = {gp[qx], gp[qy], gp[qz]};
        const double w = gw[qx] * gw[qy] * gw[qz];
        double grad[8][3];
        for (int n = 0; n < 8; n++)
        {
          const int bit[3] = {n & 1, (n >> 1) & 1, (n >> 2) & 1};
          for (int d = 0; d < 3; d++)
          {
            double g = 1.0;
            for (int e = 0; e < 3; e++)
            {
              const double f = bit[e] ? X[e] : 1 - X[e];
              g *= (e == d) ? (bit[e] ? 1.0 : -1.0) : f;
            }
            grad[n][d] = g;
          }
        }
        for (int i = 0; i < 24; i++)
        {
          for (int j = 0; j < 24; j++)
          {
            const int ni = i / 3, ai = i % 3, nj = j / 3, aj = j % 3;
            double dot = 0.0;
            for (int d = 0; d < 3; d++)
            {
              dot += grad[ni][d] * grad[nj][d];
            }
            const double val = lambda * grad[ni][ai] * grad[nj][aj] +
                               mu * ((ai == aj ? dot : 0.0) + grad[ni][aj] * grad[nj][ai]);
            K(i, j) += w * val;
          }
        }
      }
    }
  }
  return K;
}

// Node-index helper that recomputes the lexicographic numbering from scratch.
inline Index node_id(Index i, Index j, Index k, Index nx, Index ny)
{
  return i + (nx + 1) * (j + (ny + 1) * k);
}

// Full (all-DOF) stiffness sum_e E_e Ke by brute-force assembly.
inline DenseMatrix assemble_full(Index nx, Index ny, Index nz, const std::vector<double> &E,
                                 const Eigen::Matrix<double, 24, 24> &Ke)
{
  const Index ndof = 3 * (nx + 1) * (ny + 1) * (nz + 1);
  DenseMatrix K = DenseMatrix::Zero(ndof, ndof);
  Index e = 0;
  for (Index k = 0; k < nz; k++)
  {
    for (Index j = 0; j < ny; j++)
    {
      for (Index i = 0; i < nx; i++, e++)
      {
        Index dofs[24];
        for (int n = 0; n < 8; n++)
        {
          const Index nd = node_id(i + (n & 1), j + ((n >> 1) & 1), k + ((n >> 2) & 1), nx, ny);
          for (int a = 0; a < 3; a++)
          {
            dofs[3 * n + a] = 3 * nd + a;
          }
        }
        for (int a = 0; a < 24; a++)
        {
          for (int b = 0; b < 24; b++)
          {
            K(dofs[a], dofs[b]) += E[e] * Ke(a, b);
          }
        }
      }
    }
  }
  return K;
}

// Rows/columns of the free DOFs of a mask.
inline std::vector<Index> free_list(const std::vector<bool> &mask)
{
  std::vector<Index> out;
  for (std::size_t i = 0; i < mask.size(); i++)
  {
    if (!mask[i])
    {
      out.push_back(static_cast<Index>(i));
    }
  }
  return out;
}

inline DenseMatrix restrict_rows_cols(const DenseMatrix &A, const std::vector<Index> &rows,
                                      const std::vector<Index> &cols)
{
  DenseMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); i++)
  {
    for (std::size_t j = 0; j < cols.size(); j++)
    {
      out(i, j) = A(rows[i], cols[j]);
    }
  }
  return out;
}

// K_ff of a grid with modulus field E.
inline DenseMatrix free_stiffness(const gmg::StructuredGrid &g, const std::vector<double> &E,
                                  double nu = 0.3)
{
  const DenseMatrix K = assemble_full(g.nx(), g.ny(), g.nz(), E, element_stiffness(nu));
  const auto fr = free_list(g.dirichlet_mask());
  return restrict_rows_cols(K, fr, fr);
}

// 1D linear interpolation weight of coarse index c at fine index f.
inline double hat(Index f, Index c)
{
  const double d = std::abs(static_cast<double>(f) - 2.0 * static_cast<double>(c));
  return d >= 2.0 ? 0.0 : 1.0 - d / 2.0;
}

// Full vector prolongation from the coarsened grid, all DOFs.
inline DenseMatrix prolongation_full(Index nx, Index ny, Index nz)
{
  const Index cx = nx / 2, cy = ny / 2, cz = nz / 2;
  const Index nf = 3 * (nx + 1) * (ny + 1) * (nz + 1);
  const Index nc = 3 * (cx + 1) * (cy + 1) * (cz + 1);
  DenseMatrix P = DenseMatrix::Zero(nf, nc);
  for (Index k = 0; k <= nz; k++)
    for (Index j = 0; j <= ny; j++)
      for (Index i = 0; i <= nx; i++)
        for (Index kc = 0; kc <= cz; kc++)
          for (Index jc = 0; jc <= cy; jc++)
            for (Index ic = 0; ic <= cx; ic++)
            {
              const double w = hat(i, ic) * hat(j, jc) * hat(k, kc);
              if (w == 0.0)
              {
                continue;
              }
              for (int a = 0; a < 3; a++)
              {
                P(3 * node_id(i, j, k, nx, ny) + a, 3 * node_id(ic, jc, kc, cx, cy) + a) = w;
              }
            }
  return P;
}

// Injected coarse mask.
inline std::vector<bool> injected_mask(const gmg::StructuredGrid &g)
{
  const Index cx = g.nx() / 2, cy = g.ny() / 2, cz = g.nz() / 2;
  std::vector<bool> mask(3 * (cx + 1) * (cy + 1) * (cz + 1));
  for (Index k = 0; k <= cz; k++)
    for (Index j = 0; j <= cy; j++)
      for (Index i = 0; i <= cx; i++)
        for (int a = 0; a < 3; a++)
        {
          mask[3 * node_id(i, j, k, cx, cy) + a] =
            g.dirichlet_mask()[3 * node_id(2 * i, 2 * j, 2 * k, g.nx(), g.ny()) + a];
        }
  return mask;
}

// Free-restricted prolongation matrix.
inline DenseMatrix prolongation_free(const gmg::StructuredGrid &g)
{
  const DenseMatrix P = prolongation_full(g.nx(), g.ny(), g.nz());
  return restrict_rows_cols(P, free_list(g.dirichlet_mask()), free_list(injected_mask(g)));
}

inline Vector random_vector(Index n, std::uint64_t seed)
{
  gmg::SplitMix64 rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; i++)
  {
    v[i] = 2.0 * rng.uniform() - 1.0;
  }
  return v;
}

// Chebyshev polynomial of the first kind by the three-term recurrence.
inline double chebyshev_T(int n, double x)
{
  double t0 = 1.0, t1 = x;
  if (n == 0)
  {
    return t0;
  }
  for (int k = 1; k < n; k++)
  {
    const double t2 = 2 * x * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

inline double relative_frobenius(const DenseMatrix &A, const DenseMatrix &B)
{
  return (A - B).norm() / B.norm();
}

}  // namespace oracle

#endif  // GMG_TESTS_ORACLES_HPP
