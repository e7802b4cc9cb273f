// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_TRANSFER_HPP
#define GMG_TRANSFER_HPP

#include <array>

#include "gmg/element.hpp"
#include "gmg/mesh.hpp"
#include "gmg/sparse.hpp"

namespace gmg
{

//
// Trilinear 2:1 transfer between a grid and its coarsening. P maps coarse free DOFs to fine
// free DOFs and is the scalar tensor-product weight pattern times I_3; restriction is
// applied as P^T. The coarse Dirichlet mask is inherited by injection: coarse node
// (i, j, k) sits on fine node (2i, 2j, 2k) and a coarse DOF is free iff that fine DOF is.
//
struct TransferPair
{
  CsrMatrix<double> P;
  StructuredGrid coarse;

  Index fine_size() const { return P.rows(); }
  Index coarse_size() const { return P.cols(); }
};

// Throws CoarseningUnavailable when any element count is odd.
TransferPair build_transfer(const StructuredGrid &fine);

// Local prolongation of a coarse element onto its child (di, dj, dk), indexed by
// di + 2 dj + 4 dk; maps the 24 coarse-element DOFs to the 24 child-element DOFs.
const std::array<ElementMatrix, 8> &child_prolongations();

// K1 = P^T K0 P assembled element by element from the moduli, never forming K0.
CsrMatrix<double> assemble_level1(const FineOperator &op, const TransferPair &transfer);

inline void prolongate(const TransferPair &t, const Vector &coarse, Vector &fine)
{
  spmv(t.P, coarse, fine);
}

inline void restrict_to_coarse(const TransferPair &t, const Vector &fine, Vector &coarse)
{
  spmv_transpose(t.P, fine, coarse);
}

}  // namespace gmg

#endif  // GMG_TRANSFER_HPP
