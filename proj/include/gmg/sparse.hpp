// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_SPARSE_HPP
#define GMG_SPARSE_HPP

#include <algorithm>
#include <vector>

#include "gmg/bf16.hpp"
#include "gmg/common.hpp"
#include "gmg/operator.hpp"

namespace gmg
{

//
// Compressed sparse row matrix. Column indices are strictly increasing within each row
// and, after compact(), no explicit zeros are stored.
//
template <typename Scalar>
class CsrMatrix
{
public:
  CsrMatrix() = default;
  CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
            std::vector<Scalar> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values))
  {
    if (static_cast<Index>(row_ptr_.size()) != rows_ + 1 || col_idx_.size() != values_.size() ||
        row_ptr_.back() != static_cast<Index>(values_.size()))
    {
      throw std::invalid_argument("inconsistent CSR arrays");
    }
  }

  static CsrMatrix identity(Index n)
  {
    std::vector<Index> ptr(n + 1), col(n);
    for (Index i = 0; i <= n; i++)
    {
      ptr[i] = i;
    }
    for (Index i = 0; i < n; i++)
    {
      col[i] = i;
    }
    return CsrMatrix(n, n, std::move(ptr), std::move(col), std::vector<Scalar>(n, Scalar(1)));
  }

  static CsrMatrix from_dense(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &A)
  {
    std::vector<Index> ptr{0}, col;
    std::vector<Scalar> val;
    for (Index i = 0; i < A.rows(); i++)
    {
      for (Index j = 0; j < A.cols(); j++)
      {
        if (A(i, j) != Scalar(0))
        {
          col.push_back(j);
          val.push_back(A(i, j));
        }
      }
      ptr.push_back(static_cast<Index>(col.size()));
    }
    return CsrMatrix(A.rows(), A.cols(), std::move(ptr), std::move(col), std::move(val));
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  const std::vector<Index> &row_ptr() const { return row_ptr_; }
  const std::vector<Index> &col_idx() const { return col_idx_; }
  const std::vector<Scalar> &values() const { return values_; }
  std::vector<Scalar> &values() { return values_; }

  // Row pointers nondecreasing, columns strictly increasing and in range.
  bool is_valid() const
  {
    for (Index i = 0; i < rows_; i++)
    {
      if (row_ptr_[i] > row_ptr_[i + 1])
      {
        return false;
      }
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; p++)
      {
        if (col_idx_[p] < 0 || col_idx_[p] >= cols_)
        {
          return false;
        }
        if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
        {
          return false;
        }
      }
    }
    return true;
  }

  // Drops stored zeros.
  void compact()
  {
    Index out = 0, start = 0;
    for (Index i = 0; i < rows_; i++)
    {
      const Index end = row_ptr_[i + 1];
      for (Index p = start; p < end; p++)
      {
        if (values_[p] != Scalar(0))
        {
          col_idx_[out] = col_idx_[p];
          values_[out] = values_[p];
          out++;
        }
      }
      start = end;
      row_ptr_[i + 1] = out;
    }
    col_idx_.resize(out);
    values_.resize(out);
  }

  template <typename Other>
  CsrMatrix<Other> cast() const
  {
    return CsrMatrix<Other>(rows_, cols_, row_ptr_, col_idx_,
                            std::vector<Other>(values_.begin(), values_.end()));
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense() const
  {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(rows_, cols_);
    for (Index i = 0; i < rows_; i++)
    {
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; p++)
      {
        A(i, col_idx_[p]) = values_[p];
      }
    }
    return A;
  }

  VectorX<Scalar> diagonal() const
  {
    VectorX<Scalar> d = VectorX<Scalar>::Zero(std::min(rows_, cols_));
    for (Index i = 0; i < d.size(); i++)
    {
      const auto first = col_idx_.begin() + row_ptr_[i];
      const auto last = col_idx_.begin() + row_ptr_[i + 1];
      const auto it = std::lower_bound(first, last, i);
      if (it != last && *it == i)
      {
        d[i] = values_[it - col_idx_.begin()];
      }
    }
    return d;
  }

  // Position of entry (i, j) in the value array, or -1.
  Index find(Index i, Index j) const
  {
    const auto first = col_idx_.begin() + row_ptr_[i];
    const auto last = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? static_cast<Index>(it - col_idx_.begin()) : -1;
  }

private:
  Index rows_ = 0, cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<Scalar> values_;
};

// y = A x.
template <typename Scalar>
void spmv(const CsrMatrix<Scalar> &A, const VectorX<Scalar> &x, VectorX<Scalar> &y)
{
  if (x.size() != A.cols())
  {
    throw std::invalid_argument("spmv: dimension mismatch");
  }
  y.resize(A.rows());
  const auto &ptr = A.row_ptr();
  const auto &col = A.col_idx();
  const auto &val = A.values();
  for (Index i = 0; i < A.rows(); i++)
  {
    Scalar sum(0);
    for (Index p = ptr[i]; p < ptr[i + 1]; p++)
    {
      sum += val[p] * x[col[p]];
    }
    y[i] = sum;
  }
}

// y = A^T x, accumulated row by row in ascending order.
template <typename Scalar>
void spmv_transpose(const CsrMatrix<Scalar> &A, const VectorX<Scalar> &x, VectorX<Scalar> &y)
{
  if (x.size() != A.rows())
  {
    throw std::invalid_argument("spmv_transpose: dimension mismatch");
  }
  y.setZero(A.cols());
  const auto &ptr = A.row_ptr();
  const auto &col = A.col_idx();
  const auto &val = A.values();
  for (Index i = 0; i < A.rows(); i++)
  {
    const Scalar xi = x[i];
    for (Index p = ptr[i]; p < ptr[i + 1]; p++)
    {
      y[col[p]] += val[p] * xi;
    }
  }
}

template <typename Scalar>
CsrMatrix<Scalar> transpose(const CsrMatrix<Scalar> &A)
{
  std::vector<Index> ptr(A.cols() + 1, 0);
  for (Index c : A.col_idx())
  {
    ptr[c + 1]++;
  }
  for (Index j = 0; j < A.cols(); j++)
  {
    ptr[j + 1] += ptr[j];
  }
  std::vector<Index> next(ptr.begin(), ptr.end() - 1);
  std::vector<Index> col(A.nnz());
  std::vector<Scalar> val(A.nnz());
  for (Index i = 0; i < A.rows(); i++)
  {
    for (Index p = A.row_ptr()[i]; p < A.row_ptr()[i + 1]; p++)
    {
      const Index q = next[A.col_idx()[p]]++;
      col[q] = i;
      val[q] = A.values()[p];
    }
  }
  return CsrMatrix<Scalar>(A.cols(), A.rows(), std::move(ptr), std::move(col), std::move(val));
}

//
// C = A B by row-wise accumulation into a dense work row. Each output row is sorted, so the
// layout is deterministic; no entries are dropped here.
//
template <typename Scalar>
CsrMatrix<Scalar> multiply(const CsrMatrix<Scalar> &A, const CsrMatrix<Scalar> &B)
{
  if (A.cols() != B.rows())
  {
    throw std::invalid_argument("sparse multiply: dimension mismatch");
  }
  std::vector<Index> ptr{0}, col;
  std::vector<Scalar> val;
  std::vector<Scalar> work(B.cols(), Scalar(0));
  std::vector<Index> marker(B.cols(), -1);
  std::vector<Index> row_cols;
  for (Index i = 0; i < A.rows(); i++)
  {
    row_cols.clear();
    for (Index p = A.row_ptr()[i]; p < A.row_ptr()[i + 1]; p++)
    {
      const Index k = A.col_idx()[p];
      const Scalar a = A.values()[p];
      for (Index q = B.row_ptr()[k]; q < B.row_ptr()[k + 1]; q++)
      {
        const Index j = B.col_idx()[q];
        if (marker[j] != i)
        {
          marker[j] = i;
          work[j] = Scalar(0);
          row_cols.push_back(j);
        }
        work[j] += a * B.values()[q];
      }
    }
    std::sort(row_cols.begin(), row_cols.end());
    for (Index j : row_cols)
    {
      col.push_back(j);
      val.push_back(work[j]);
    }
    ptr.push_back(static_cast<Index>(col.size()));
  }
  return CsrMatrix<Scalar>(A.rows(), B.cols(), std::move(ptr), std::move(col), std::move(val));
}

// P^T K P with compacted, sorted rows.
template <typename Scalar>
CsrMatrix<Scalar> triple_product(const CsrMatrix<Scalar> &P, const CsrMatrix<Scalar> &K)
{
  if (K.rows() != K.cols() || K.cols() != P.rows())
  {
    throw std::invalid_argument("triple product: dimension mismatch");
  }
  CsrMatrix<Scalar> C = multiply(transpose(P), multiply(K, P));
  C.compact();
  return C;
}

//
// Assembled level operator. Keeps FP32 and BF16-rounded copies of the values for the
// reduced-precision applications.
//
class SparseOperator : public LinearOperator
{
public:
  explicit SparseOperator(CsrMatrix<double> A);

  const CsrMatrix<double> &matrix() const { return A_; }

  Index size() const override { return A_.rows(); }
  void apply(const Vector &x, Vector &y) const override { spmv(A_, x, y); }
  void apply(const VectorF &x, VectorF &y, PrecisionTag prec) const override;

private:
  CsrMatrix<double> A_;
  CsrMatrix<float> A_fp32_;
  CsrMatrix<float> A_bf16_;
};

}  // namespace gmg

#endif  // GMG_SPARSE_HPP
