// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <memory>

#include <Eigen/Eigenvalues>

#include "gmg/element.hpp"
#include "oracles.hpp"

using namespace gmg;

namespace
{

FineOperator uniform_operator(StructuredGrid g, double E = 1.0)
{
  ModulusField m;
  m.E.assign(g.num_elements(), E);
  return FineOperator(std::move(g), std::move(m));
}

StructuredGrid free_grid(Index nx, Index ny, Index nz)
{
  return StructuredGrid(nx, ny, nz, std::vector<bool>(3 * (nx + 1) * (ny + 1) * (nz + 1), false));
}

}  // namespace

TEST_SUITE("element")
{
  TEST_CASE("Ke matches the independent quadrature oracle")
  {
    const auto Ke = unit_element_stiffness(0.3).Ke;
    const auto ref = oracle::element_stiffness(0.3);
    CHECK((Ke - ref).cwiseAbs().maxCoeff() < 1e-14);
    // Exact value from symbolic integration: 55/234.
    CHECK(Ke(0, 0) == doctest::Approx(55.0 / 234.0).epsilon(1e-14));
    CHECK(Ke(0, 1) == doctest::Approx(25.0 / 312.0).epsilon(1e-14));
    CHECK(Ke(0, 3) == doctest::Approx(-25.0 / 234.0).epsilon(1e-14));
  }

  TEST_CASE("Ke is symmetric PSD with a six-dimensional nullspace")
  {
    for (double nu : {0.0, 0.3, 0.45})
    {
      const auto Ke = unit_element_stiffness(nu).Ke;
      CHECK((Ke - Ke.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::SelfAdjointEigenSolver<ElementMatrix> eig(Ke);
      const auto ev = eig.eigenvalues();
      const double lmax = ev.maxCoeff();
      int zeros = 0;
      for (int i = 0; i < 24; i++)
      {
        CHECK(ev[i] > -1e-12);
        zeros += std::abs(ev[i]) < 1e-9 * lmax;
      }
      CHECK(zeros == 6);
    }
  }

  TEST_CASE("rigid translations and rotations are in the nullspace")
  {
    const auto Ke = unit_element_stiffness(0.3).Ke;
    for (int axis = 0; axis < 3; axis++)
    {
      ElementVector t = ElementVector::Zero();
      for (int n = 0; n < 8; n++)
      {
        t[3 * n + axis] = 1.0;
      }
      CHECK((Ke * t).cwiseAbs().maxCoeff() < 1e-10);
    }
    // Rotation about z: u = (-y, x, 0).
    ElementVector r = ElementVector::Zero();
    for (int n = 0; n < 8; n++)
    {
      r[3 * n] = -static_cast<double>((n >> 1) & 1);
      r[3 * n + 1] = static_cast<double>(n & 1);
    }
    CHECK((Ke * r).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("Poisson ratio domain")
  {
    CHECK_THROWS_AS(unit_element_stiffness(0.5), std::invalid_argument);
    CHECK_THROWS_AS(unit_element_stiffness(-0.1), std::invalid_argument);
  }

  TEST_CASE("single free element: columns are E0 Ke")
  {
    const auto op = uniform_operator(free_grid(1, 1, 1), 2.5);
    const auto Ke = unit_element_stiffness(0.3).Ke;
    Vector e = Vector::Zero(24), y;
    for (int j = 0; j < 24; j++)
    {
      e.setZero();
      e[j] = 1.0;
      op.apply(e, y);
      CHECK((y - 2.5 * Ke.col(j)).cwiseAbs().maxCoeff() < 1e-14);
    }
    const Vector d = fine_diagonal(op);
    CHECK((d - 2.5 * Ke.diagonal()).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("global translation is annihilated on an unconstrained grid")
  {
    const auto op = uniform_operator(free_grid(3, 2, 2));
    Vector u = Vector::Zero(op.size());
    for (Index i = 0; i < op.size(); i += 3)
    {
      u[i + 1] = 1.0;
    }
    Vector y;
    op.apply(u, y);
    CHECK(y.cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("matvec matches brute-force dense assembly on the 2x1x1 cantilever")
  {
    auto g = build_cantilever(2, 1, 1);
    ModulusField m;
    m.E = {1.0, 0.3};
    const DenseMatrix ref = oracle::free_stiffness(g, m.E);
    const FineOperator op(g, m);
    for (int t = 0; t < 5; t++)
    {
      const Vector u = oracle::random_vector(op.size(), 100 + t);
      Vector y;
      op.apply(u, y);
      CHECK((y - ref * u).norm() / (ref * u).norm() < 1e-12);
    }
    const DenseMatrix K = assemble_dense(op);
    CHECK(oracle::relative_frobenius(K, ref) < 1e-14);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(K);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }

  TEST_CASE("assemble_dense agrees with the matvec and is symmetric")
  {
    const auto g = build_cantilever(4, 2, 2);
    const auto rho = make_state(g, StateKind::Binary, {0.5, 1e-2}, 3);
    const FineOperator op(g, simp_modulus(rho, 3.0, 1e-9, 1.0));
    const DenseMatrix K = assemble_dense(op);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (int t = 0; t < 50; t++)
    {
      const Vector u = oracle::random_vector(op.size(), 7 * t + 1);
      Vector y;
      op.apply(u, y);
      CHECK((y - K * u).norm() / (K * u).norm() < 1e-12);
    }
    // Interior diagonal equals the assembled one.
    const Vector d = fine_diagonal(op);
    CHECK((d - K.diagonal()).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("matvec is linear, energy-positive and scales with E")
  {
    const auto g = build_cantilever(4, 2, 2);
    const auto rho = make_state(g, StateKind::RandomFloor, {0.5, 1e-3}, 9);
    const auto mod = simp_modulus(rho, 3.0, 1e-9, 1.0);
    const FineOperator op(g, mod);
    ModulusField scaled = mod;
    for (auto &E : scaled.E)
    {
      E *= 4.0;
    }
    const FineOperator op4(g, scaled);
    for (int t = 0; t < 20; t++)
    {
      const Vector u = oracle::random_vector(op.size(), 300 + t);
      const Vector v = oracle::random_vector(op.size(), 400 + t);
      Vector Ku, Kv, Kw, K4u;
      op.apply(u, Ku);
      op.apply(v, Kv);
      op.apply(Vector(1.5 * u - 0.25 * v), Kw);
      CHECK((Kw - (1.5 * Ku - 0.25 * Kv)).norm() <= 1e-12 * Kw.norm());
      CHECK(u.dot(Ku) > 0.0);
      op4.apply(u, K4u);
      CHECK((K4u - 4.0 * Ku).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("reduced-precision matvecs stay close to FP64")
  {
    const auto g = build_cantilever(4, 2, 2);
    const auto op = uniform_operator(g, 0.125);
    const Vector u = oracle::random_vector(op.size(), 11);
    Vector y64;
    op.apply(u, y64);
    VectorF y32, ybf;
    op.apply(VectorF(u.cast<float>()), y32, PrecisionTag::FP32);
    op.apply(VectorF(u.cast<float>()), ybf, PrecisionTag::BF16EMU);
    const double e32 = (y32.cast<double>() - y64).norm() / y64.norm();
    const double ebf = (ybf.cast<double>() - y64).norm() / y64.norm();
    CHECK(e32 < 1e-6);
    CHECK(ebf < 5e-2);
    CHECK(ebf > e32);
  }

  TEST_CASE("diagonal floor")
  {
    Vector d(4);
    d << 1.0, 1.0, 2.0, 0.0;
    const Vector f = floor_diagonal(d);
    CHECK(f[3] == doctest::Approx(1e-14 * 1.0));
    CHECK(f[0] == 1.0);

    // A near-zero modulus element with no stiff neighbour gets floored.
    auto g = free_grid(2, 1, 1);
    ModulusField m;
    m.E = {1.0, 1e-30};
    const FineOperator op(g, m);
    const Vector diag = fine_diagonal(op);
    Vector raw = Vector::Zero(op.size());
    const auto Ke = unit_element_stiffness(0.3).Ke;
    for (int e = 0; e < 2; e++)
      for (int l = 0; l < 24; l++)
      {
        raw[op.element_dofs()[e][l]] += m.E[e] * Ke(l, l);
      }
    const double floor = 1e-14 * raw.mean();
    for (Index i = 0; i < op.size(); i++)
    {
      if (raw[i] < floor)
      {
        CHECK(diag[i] == floor);
      }
      else
      {
        CHECK(diag[i] == raw[i]);
      }
    }
    CHECK((diag.array() == floor).count() > 0);
  }

  TEST_CASE("length mismatch and dense guard")
  {
    const auto op = uniform_operator(build_cantilever(2, 1, 1));
    Vector y;
    CHECK_THROWS_AS(op.apply(Vector::Zero(3), y), std::invalid_argument);
    const auto big = uniform_operator(build_cantilever(40, 20, 10));
    CHECK(big.size() > kDenseAssemblyLimit);
    CHECK_THROWS_AS(assemble_dense(big), std::invalid_argument);
  }
}
