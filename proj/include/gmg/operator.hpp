// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_OPERATOR_HPP
#define GMG_OPERATOR_HPP

#include <functional>

#include "gmg/common.hpp"

namespace gmg
{

using ApplyFn = std::function<void(const Vector &, Vector &)>;

//
// Square operator on a free-DOF vector space. The FP64 application is exact-path; the
// single-precision overload is used by reduced-precision smoothers: under FP32 all
// arithmetic is single precision, under BF16EMU inputs and stored coefficients are rounded
// to bfloat16 and accumulated in FP32.
//
class LinearOperator
{
public:
  virtual ~LinearOperator() = default;

  virtual Index size() const = 0;

  virtual void apply(const Vector &x, Vector &y) const = 0;

  virtual void apply(const VectorF &x, VectorF &y, PrecisionTag prec) const;

  ApplyFn as_function() const
  {
    return [this](const Vector &x, Vector &y) { apply(x, y); };
  }
};

// Dense matrix wrapper, mostly for tests and small coarse problems.
class DenseOperator : public LinearOperator
{
public:
  explicit DenseOperator(DenseMatrix A) : A_(std::move(A)) {}

  Index size() const override { return A_.rows(); }
  void apply(const Vector &x, Vector &y) const override { y.noalias() = A_ * x; }
  using LinearOperator::apply;

  const DenseMatrix &matrix() const { return A_; }

private:
  DenseMatrix A_;
};

}  // namespace gmg

#endif  // GMG_OPERATOR_HPP
