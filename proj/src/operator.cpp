// SPDX-License-Identifier: Apache-2.0

#include "gmg/operator.hpp"

#include "gmg/bf16.hpp"

namespace gmg
{

void LinearOperator::apply(const VectorF &x, VectorF &y, PrecisionTag prec) const
{
  Vector xd = x.cast<double>();
  if (prec == PrecisionTag::BF16EMU)
  {
    round_bf16_inplace(xd);
  }
  Vector yd(size());
  apply(xd, yd);
  y = yd.cast<float>();
}

}  // namespace gmg
