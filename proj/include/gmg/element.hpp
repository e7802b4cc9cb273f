// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_ELEMENT_HPP
#define GMG_ELEMENT_HPP

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gmg/mesh.hpp"
#include "gmg/operator.hpp"

namespace gmg
{

using ElementMatrix = Eigen::Matrix<double, 24, 24>;
using ElementVector = Eigen::Matrix<double, 24, 1>;

// Local DOF 3 * n + axis, with local node n = a + 2 b + 4 c.
using ElementDofs = std::array<std::int32_t, 24>;

inline constexpr double kDefaultPoisson = 0.3;

struct ElementStiffness
{
  ElementMatrix Ke;
  double nu = kDefaultPoisson;
};

// Unit-modulus stiffness of the trilinear hexahedron on the unit cube, integrated with
// 2x2x2 Gauss quadrature.
ElementStiffness unit_element_stiffness(double nu = kDefaultPoisson);

//
// Matrix-free fine-level elasticity operator: y = sum_e E_e Ke u_e restricted to the free
// DOFs. Fixed DOFs are read as zero. Elements are visited in ascending order so the FP64
// result is bit-reproducible.
//
class FineOperator : public LinearOperator
{
public:
  FineOperator(StructuredGrid grid, ModulusField modulus, double nu = kDefaultPoisson);

  const StructuredGrid &grid() const { return grid_; }
  const ModulusField &modulus() const { return modulus_; }
  const ElementMatrix &element_stiffness() const { return Ke_; }

  // Free indices of the 24 local DOFs of each element (-1 for fixed).
  const std::vector<ElementDofs> &element_dofs() const { return dofs_; }

  Index size() const override { return grid_.num_free(); }

  void apply(const Vector &x, Vector &y) const override;
  void apply(const VectorF &x, VectorF &y, PrecisionTag prec) const override;

private:
  StructuredGrid grid_;
  ModulusField modulus_;
  ElementMatrix Ke_;
  Eigen::Matrix<float, 24, 24> Ke_fp32_, Ke_bf16_;
  std::vector<float> E_fp32_;
  std::vector<ElementDofs> dofs_;
};

// Floors every entry at 1e-14 times the mean of the unfloored entries.
Vector floor_diagonal(Vector diag);

// diag(K_ff), floored.
Vector fine_diagonal(const FineOperator &op);

// Explicit K_ff, for oracle checks only.
inline constexpr Index kDenseAssemblyLimit = 20000;
DenseMatrix assemble_dense(const FineOperator &op);

}  // namespace gmg

#endif  // GMG_ELEMENT_HPP
