// SPDX-License-Identifier: Apache-2.0

#include "gmg/sparse.hpp"

namespace gmg
{

SparseOperator::SparseOperator(CsrMatrix<double> A)
  : A_(std::move(A)), A_fp32_(A_.cast<float>()), A_bf16_(A_fp32_)
{
  if (A_.rows() != A_.cols())
  {
    throw std::invalid_argument("level operator must be square");
  }
  for (float &v : A_bf16_.values())
  {
    v = round_bf16(v);
  }
}

void SparseOperator::apply(const VectorF &x, VectorF &y, PrecisionTag prec) const
{
  switch (prec)
  {
    case PrecisionTag::FP64:
      LinearOperator::apply(x, y, prec);
      break;
    case PrecisionTag::FP32:
      spmv(A_fp32_, x, y);
      break;
    case PrecisionTag::BF16EMU:
    {
      VectorF xr = x;
      round_bf16_inplace(xr);
      spmv(A_bf16_, xr, y);
      break;
    }
  }
}

}  // namespace gmg
