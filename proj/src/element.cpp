// SPDX-License-Identifier: Apache-2.0

#include "gmg/element.hpp"

#include <cmath>

#include "gmg/bf16.hpp"

namespace gmg
{

ElementStiffness unit_element_stiffness(double nu)
{
  if (!(nu >= 0.0 && nu < 0.5))
  {
    throw std::invalid_argument("Poisson ratio must lie in [0, 0.5)");
  }
  const double lambda = nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = 1.0 / (2.0 * (1.0 + nu));
  Eigen::Matrix<double, 6, 6> D = Eigen::Matrix<double, 6, 6>::Zero();
  D.topLeftCorner<3, 3>().setConstant(lambda);
  D.topLeftCorner<3, 3>().diagonal().array() += 2.0 * mu;
  D.bottomRightCorner<3, 3>().diagonal().setConstant(mu);

  const double g = 0.5 / std::sqrt(3.0);
  const double pts[2] = {0.5 - g, 0.5 + g};

  ElementStiffness out;
  out.nu = nu;
  out.Ke.setZero();
  for (double x : pts)
  {
    for (double y : pts)
    {
      for (double z : pts)
      {
        Eigen::Matrix<double, 6, 24> B = Eigen::Matrix<double, 6, 24>::Zero();
        for (int n = 0; n < 8; n++)
        {
          const int a = n & 1, b = (n >> 1) & 1, c = (n >> 2) & 1;
          const double sx = a ? x : 1.0 - x, sy = b ? y : 1.0 - y, sz = c ? z : 1.0 - z;
          const double dx = (a ? 1.0 : -1.0) * sy * sz;
          const double dy = sx * (b ? 1.0 : -1.0) * sz;
          const double dz = sx * sy * (c ? 1.0 : -1.0);
          const int col = 3 * n;
          B(0, col) = dx;
          B(1, col + 1) = dy;
          B(2, col + 2) = dz;
          B(3, col) = dy;
          B(3, col + 1) = dx;
          B(4, col + 1) = dz;
          B(4, col + 2) = dy;
          B(5, col) = dz;
          B(5, col + 2) = dx;
        }
        // Unit cube: detJ = 1, each Gauss weight is 1/8.
        out.Ke.noalias() += 0.125 * B.transpose() * D * B;
      }
    }
  }
  out.Ke = 0.5 * (out.Ke + out.Ke.transpose()).eval();
  return out;
}

FineOperator::FineOperator(StructuredGrid grid, ModulusField modulus, double nu)
  : grid_(std::move(grid)), modulus_(std::move(modulus)), Ke_(unit_element_stiffness(nu).Ke)
{
  if (static_cast<Index>(modulus_.E.size()) != grid_.num_elements())
  {
    throw std::invalid_argument("modulus field length does not match element count");
  }
  Ke_fp32_ = Ke_.cast<float>();
  Ke_bf16_ = Ke_fp32_;
  round_bf16_inplace(Ke_bf16_);
  E_fp32_.assign(modulus_.E.begin(), modulus_.E.end());

  dofs_.resize(grid_.num_elements());
  for (Index e = 0; e < grid_.num_elements(); e++)
  {
    const auto nodes = grid_.element_nodes(e);
    for (int n = 0; n < 8; n++)
    {
      for (int axis = 0; axis < 3; axis++)
      {
        dofs_[e][3 * n + axis] = static_cast<std::int32_t>(grid_.free_index(3 * nodes[n] + axis));
      }
    }
  }
}

void FineOperator::apply(const Vector &x, Vector &y) const
{
  if (x.size() != size())
  {
    throw std::invalid_argument("fine matvec: input length does not match free-DOF count");
  }
  y.setZero(size());
  ElementVector ue, fe;
  for (std::size_t e = 0; e < dofs_.size(); e++)
  {
    const ElementDofs &dofs = dofs_[e];
    for (int l = 0; l < 24; l++)
    {
      ue[l] = dofs[l] >= 0 ? x[dofs[l]] : 0.0;
    }
    fe.noalias() = Ke_ * ue;
    const double Ee = modulus_.E[e];
    for (int l = 0; l < 24; l++)
    {
      if (dofs[l] >= 0)
      {
        y[dofs[l]] += Ee * fe[l];
      }
    }
  }
}

void FineOperator::apply(const VectorF &x, VectorF &y, PrecisionTag prec) const
{
  if (prec == PrecisionTag::FP64)
  {
    Vector yd;
    apply(Vector(x.cast<double>()), yd);
    y = yd.cast<float>();
    return;
  }
  if (x.size() != size())
  {
    throw std::invalid_argument("fine matvec: input length does not match free-DOF count");
  }
  const bool bf16 = prec == PrecisionTag::BF16EMU;
  const Eigen::Matrix<float, 24, 24> &K = bf16 ? Ke_bf16_ : Ke_fp32_;
  y.setZero(size());
  Eigen::Matrix<float, 24, 1> ue, fe;
  for (std::size_t e = 0; e < dofs_.size(); e++)
  {
    const ElementDofs &dofs = dofs_[e];
    for (int l = 0; l < 24; l++)
    {
      const float v = dofs[l] >= 0 ? x[dofs[l]] : 0.0f;
      ue[l] = bf16 ? round_bf16(v) : v;
    }
    fe.noalias() = K * ue;
    const float Ee = E_fp32_[e];
    for (int l = 0; l < 24; l++)
    {
      if (dofs[l] >= 0)
      {
        y[dofs[l]] += Ee * fe[l];
      }
    }
  }
}

Vector floor_diagonal(Vector diag)
{
  if (diag.size() == 0)
  {
    return diag;
  }
  const double floor = 1e-14 * diag.mean();
  for (Index i = 0; i < diag.size(); i++)
  {
    diag[i] = std::max(diag[i], floor);
  }
  return diag;
}

Vector fine_diagonal(const FineOperator &op)
{
  Vector diag = Vector::Zero(op.size());
  const auto &Ke = op.element_stiffness();
  const auto &E = op.modulus().E;
  const auto &dofs = op.element_dofs();
  for (std::size_t e = 0; e < dofs.size(); e++)
  {
    for (int l = 0; l < 24; l++)
    {
      if (dofs[e][l] >= 0)
      {
        diag[dofs[e][l]] += E[e] * Ke(l, l);
      }
    }
  }
  return floor_diagonal(std::move(diag));
}

DenseMatrix assemble_dense(const FineOperator &op)
{
  if (op.size() > kDenseAssemblyLimit)
  {
    throw std::invalid_argument("dense assembly limited to 20000 free DOFs");
  }
  DenseMatrix K = DenseMatrix::Zero(op.size(), op.size());
  const auto &Ke = op.element_stiffness();
  const auto &E = op.modulus().E;
  const auto &dofs = op.element_dofs();
  for (std::size_t e = 0; e < dofs.size(); e++)
  {
    for (int a = 0; a < 24; a++)
    {
      if (dofs[e][a] < 0)
      {
        continue;
      }
      for (int b = 0; b < 24; b++)
      {
        if (dofs[e][b] >= 0)
        {
          K(dofs[e][a], dofs[e][b]) += E[e] * Ke(a, b);
        }
      }
    }
  }
  return K;
}

}  // namespace gmg
