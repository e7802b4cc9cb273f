// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include <Eigen/Eigenvalues>

#include "gmg/transfer.hpp"
#include "oracles.hpp"

using namespace gmg;

namespace
{

StructuredGrid free_grid(Index nx, Index ny, Index nz)
{
  return StructuredGrid(nx, ny, nz, std::vector<bool>(3 * (nx + 1) * (ny + 1) * (nz + 1), false));
}

FineOperator state_operator(const StructuredGrid &g, StateKind kind, std::uint64_t seed)
{
  const auto rho = make_state(g, kind, {0.5, 1e-2}, seed);
  return FineOperator(g, simp_modulus(rho, 3.0, 1e-9, 1.0));
}

}  // namespace

TEST_SUITE("sparse")
{
  TEST_CASE("triple product with identity returns K bit-for-bit")
  {
    const auto op = state_operator(build_cantilever(4, 2, 2), StateKind::Binary, 4);
    auto K = CsrMatrix<double>::from_dense(assemble_dense(op));
    const auto C = triple_product(CsrMatrix<double>::identity(K.rows()), K);
    K.compact();
    CHECK(C.row_ptr() == K.row_ptr());
    CHECK(C.col_idx() == K.col_idx());
    CHECK(C.values() == K.values());
  }

  TEST_CASE("small triple product matches dense")
  {
    DenseMatrix P(3, 2), K(3, 3);
    P << 1, 0, 0.5, 0.5, 0, 1;
    K << 4, -1, 0, -1, 4, -1, 0, -1, 4;
    const auto C = triple_product(CsrMatrix<double>::from_dense(P), CsrMatrix<double>::from_dense(K));
    const DenseMatrix ref = P.transpose() * K * P;
    CHECK((C.to_dense() - ref).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(C.is_valid());
    CHECK_THROWS_AS(triple_product(CsrMatrix<double>::from_dense(K), CsrMatrix<double>::from_dense(P)),
                    std::invalid_argument);
  }

  TEST_CASE("random sparse triple products against dense")
  {
    SplitMix64 rng(77);
    for (int t = 0; t < 10; t++)
    {
      const Index n = 20 + t, m = 7 + t;
      DenseMatrix P = DenseMatrix::Zero(n, m), A = DenseMatrix::Zero(n, n);
      for (Index i = 0; i < n; i++)
        for (Index j = 0; j < m; j++)
          if (rng.uniform() < 0.2)
            P(i, j) = rng.uniform();
      for (Index i = 0; i < n; i++)
        for (Index j = 0; j <= i; j++)
          if (i == j || rng.uniform() < 0.3)
            A(i, j) = A(j, i) = rng.uniform() - 0.5;
      const auto C = triple_product(CsrMatrix<double>::from_dense(P), CsrMatrix<double>::from_dense(A));
      const DenseMatrix ref = P.transpose() * A * P;
      CHECK(oracle::relative_frobenius(C.to_dense(), ref) < 1e-12);
      const DenseMatrix Cd = C.to_dense();
      CHECK((Cd - Cd.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(C.is_valid());
      for (double v : C.values())
      {
        CHECK(v != 0.0);
      }
    }
  }

  TEST_CASE("transpose and spmv_transpose agree")
  {
    DenseMatrix A(3, 4);
    A << 1, 0, 2, 0, 0, 3, 0, 4, 5, 0, 0, 6;
    const auto S = CsrMatrix<double>::from_dense(A);
    CHECK((transpose(S).to_dense() - A.transpose()).norm() == 0.0);
    Vector x(3), y;
    x << 1, -2, 0.5;
    spmv_transpose(S, x, y);
    CHECK((y - A.transpose() * x).norm() < 1e-15);
  }
}

TEST_SUITE("transfer")
{
  TEST_CASE("1D weights: inject on even, split on odd")
  {
    // 2x2x2 free grid; along x fine nodes {0,1,2} map to coarse {0,1}.
    const auto g = free_grid(2, 2, 2);
    const auto t = build_transfer(g);
    const DenseMatrix P = t.P.to_dense();
    auto row = [&](Index i, Index j, Index k) { return 3 * g.node(i, j, k); };
    auto col = [&](Index i, Index j, Index k) { return 3 * t.coarse.node(i, j, k); };
    CHECK(P(row(0, 0, 0), col(0, 0, 0)) == 1.0);
    CHECK(P(row(0, 0, 0), col(1, 0, 0)) == 0.0);
    CHECK(P(row(1, 0, 0), col(0, 0, 0)) == 0.5);
    CHECK(P(row(1, 0, 0), col(1, 0, 0)) == 0.5);
    CHECK(P(row(2, 0, 0), col(1, 0, 0)) == 1.0);
    CHECK(P(row(2, 0, 0), col(0, 0, 0)) == 0.0);
    CHECK(P(row(1, 1, 1), col(0, 0, 0)) == 0.125);
  }

  TEST_CASE("fully free grid: scalar rows sum to one, weights in the allowed set")
  {
    const auto g = free_grid(2, 2, 2);
    const auto t = build_transfer(g);
    const std::set<double> allowed{1.0, 0.5, 0.25, 0.125};
    for (Index r = 0; r < t.P.rows(); r++)
    {
      double sum = 0.0;
      for (Index p = t.P.row_ptr()[r]; p < t.P.row_ptr()[r + 1]; p++)
      {
        sum += t.P.values()[p];
        CHECK(allowed.count(t.P.values()[p]) == 1);
      }
      CHECK(sum == doctest::Approx(1.0));
    }
  }

  TEST_CASE("matches the dense oracle prolongation with injection masking")
  {
    for (auto g : {build_cantilever(4, 2, 2), build_cantilever(8, 4, 4), build_cantilever(2, 2, 4)})
    {
      const auto t = build_transfer(g);
      CHECK(t.coarse.dirichlet_mask() == oracle::injected_mask(g));
      CHECK((t.P.to_dense() - oracle::prolongation_free(g)).cwiseAbs().maxCoeff() == 0.0);
      CHECK(t.P.is_valid());
    }
  }

  TEST_CASE("cantilever 4x2x2: coarse fixed nodes are exactly the x = 0 face")
  {
    const auto g = build_cantilever(4, 2, 2);
    const auto t = build_transfer(g);
    Index fixed_nodes = 0;
    for (Index n = 0; n < t.coarse.num_nodes(); n++)
    {
      fixed_nodes += t.coarse.is_fixed(3 * n);
    }
    // Brute force: injected nodes (2i, 2j, 2k) that are fixed on the fine grid.
    Index expected = 0;
    for (Index k = 0; k <= 1; k++)
      for (Index j = 0; j <= 1; j++)
        for (Index i = 0; i <= 2; i++)
          expected += g.is_fixed(3 * g.node(2 * i, 2 * j, 2 * k));
    CHECK(fixed_nodes == expected);
    CHECK(fixed_nodes == 2 * 2);
    CHECK(t.coarse.load().isZero());
  }

  TEST_CASE("restriction is the transpose of prolongation")
  {
    const auto g = build_cantilever(8, 4, 4);
    const auto t = build_transfer(g);
    for (int trial = 0; trial < 10; trial++)
    {
      const Vector xc = oracle::random_vector(t.coarse_size(), 10 + trial);
      const Vector yf = oracle::random_vector(t.fine_size(), 20 + trial);
      Vector Px, Rty;
      prolongate(t, xc, Px);
      restrict_to_coarse(t, yf, Rty);
      const double lhs = Px.dot(yf), rhs = xc.dot(Rty);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
    }
  }

  TEST_CASE("odd dimensions cannot be coarsened")
  {
    CHECK_THROWS_AS(build_transfer(build_cantilever(3, 2, 2)), CoarseningUnavailable);
    CHECK_THROWS_AS(build_transfer(build_cantilever(2, 2, 1)), CoarseningUnavailable);
  }

  TEST_CASE("level-1 Galerkin assembly matches the dense triple product")
  {
    for (auto g : {build_cantilever(4, 2, 2), build_cantilever(8, 4, 4)})
    {
      for (auto kind : {StateKind::Uniform, StateKind::Binary, StateKind::Checkerboard})
      {
        const auto op = state_operator(g, kind, 21);
        const auto t = build_transfer(g);
        const auto K1 = assemble_level1(op, t);
        const DenseMatrix P = oracle::prolongation_free(g);
        const DenseMatrix ref = P.transpose() * oracle::free_stiffness(g, op.modulus().E) * P;
        CHECK(oracle::relative_frobenius(K1.to_dense(), ref) < 1e-10);
        CHECK(K1.is_valid());
        const DenseMatrix K1d = K1.to_dense();
        CHECK((K1d - K1d.transpose()).cwiseAbs().maxCoeff() < 1e-12 * K1d.cwiseAbs().maxCoeff());
      }
    }
  }

  TEST_CASE("level-1 assembly is linear in the moduli")
  {
    const auto g = build_cantilever(4, 2, 2);
    const auto op = state_operator(g, StateKind::RandomFloor, 8);
    ModulusField twice = op.modulus();
    for (auto &E : twice.E)
    {
      E *= 2.0;
    }
    const FineOperator op2(g, twice);
    const auto t = build_transfer(g);
    const auto K1 = assemble_level1(op, t);
    const auto K2 = assemble_level1(op2, t);
    CHECK(K1.col_idx() == K2.col_idx());
    for (std::size_t i = 0; i < K1.values().size(); i++)
    {
      CHECK(K2.values()[i] == 2.0 * K1.values()[i]);
    }
  }

  TEST_CASE("Galerkin chain and coarse SPD on oracle grids")
  {
    const auto g = build_cantilever(8, 4, 4);
    const auto op = state_operator(g, StateKind::Binary, 5);
    const auto t0 = build_transfer(g);
    const auto K1 = assemble_level1(op, t0);
    const auto t1 = build_transfer(t0.coarse);
    const auto K2 = triple_product(t1.P, K1);
    const DenseMatrix P1 = oracle::prolongation_free(t0.coarse);
    const DenseMatrix ref = P1.transpose() * K1.to_dense() * P1;
    CHECK(oracle::relative_frobenius(K2.to_dense(), ref) < 1e-12);
    for (const auto *K : {&K1, &K2})
    {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(K->to_dense());
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
  }
}
