// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_COMMON_HPP
#define GMG_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace gmg
{

using Index = std::int64_t;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector = VectorX<double>;
using VectorF = VectorX<float>;
using DenseMatrix = Eigen::MatrixXd;

// Rounding regime used inside a level's smoother and matvec.
enum class PrecisionTag
{
  FP64,
  FP32,
  BF16EMU
};

std::string_view to_string(PrecisionTag tag);
PrecisionTag parse_precision_tag(std::string_view name);

// Thrown when a grid cannot be coarsened 2:1 (odd element count on some axis).
class CoarseningUnavailable : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace gmg

#endif  // GMG_COMMON_HPP
