// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_MULTIGRID_HPP
#define GMG_MULTIGRID_HPP

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "gmg/element.hpp"
#include "gmg/smoothers.hpp"
#include "gmg/sparse.hpp"
#include "gmg/transfer.hpp"

namespace gmg
{

// Per-level precision schedules.
//   FP64: all levels FP64
//   FP32: FP32 on the fine level, FP64 below
//   BF16: BF16EMU on the fine level, FP32 on level 1, FP64 below
enum class PrecisionPolicy
{
  FP64,
  FP32,
  BF16
};

std::string_view to_string(PrecisionPolicy policy);
PrecisionPolicy parse_precision_policy(std::string_view name);
PrecisionTag level_precision(PrecisionPolicy policy, int level);

inline constexpr Index kDenseCoarsestLimit = 5000;
inline constexpr int kCoarsestPcgSteps = 80;
inline constexpr double kDefaultLambdaSafety = 1.1;

struct HierarchyConfig
{
  int levels = 4;
  PrecisionPolicy precision = PrecisionPolicy::FP32;
  SmootherConfig smoother;
  int power_iters_fine = 20;
  int power_iters_coarse = 10;
  Index dense_limit = kDenseCoarsestLimit;
  int coarsest_pcg_steps = kCoarsestPcgSteps;
  std::uint64_t power_seed = 0;
  // Chebyshev targets lambda_safety * lambda_max; the stored estimate stays raw.
  double lambda_safety = kDefaultLambdaSafety;
};

struct Level
{
  std::shared_ptr<const LinearOperator> op;
  StructuredGrid grid;
  Vector diag_inv;
  double lambda_max = 1.0;
  PrecisionTag precision = PrecisionTag::FP64;
};

// Regularized coarsest solve (K_L + eps I)^{-1}, eps = max(mean_diag 1e-8, 1e-14).
struct CoarsestSolve
{
  enum class Mode
  {
    DenseCholesky,
    Pcg
  };
  Mode mode = Mode::DenseCholesky;
  double epsilon = 0.0;
  int pcg_steps = kCoarsestPcgSteps;
  Eigen::LLT<DenseMatrix> factor;
};

double coarsest_regularization(double mean_diag);

// lambda_max estimates with the fine-level modulus maximum they were computed for.
struct SpectralCache
{
  double max_modulus = 0.0;
  std::vector<double> lambdas;

  // Reusable unless max_e E_e moved by more than 10% or the depth changed.
  bool reusable(double new_max_modulus, std::size_t levels) const;
};

class GmgHierarchy
{
public:
  int num_levels() const { return static_cast<int>(levels_.size()); }
  const Level &level(int l) const { return levels_[l]; }
  const TransferPair &transfer(int l) const { return transfers_[l]; }
  const CoarsestSolve &coarsest() const { return coarsest_; }
  const HierarchyConfig &config() const { return config_; }
  const std::vector<std::string> &warnings() const { return warnings_; }

  Index fine_size() const { return levels_.front().op->size(); }

  Vector vcycle(const Vector &r) const;
  Vector wcycle(const Vector &r) const;

  // One application of the coarsest solve to a coarsest-level vector.
  Vector coarsest_solve(const Vector &r) const;

  // Pre- or post-smoothing at one level, from initial guess x.
  Vector smooth(int l, const Vector &b, const Vector &x) const;

  ApplyFn as_preconditioner(bool w_cycle = false) const;

private:
  friend class HierarchyBuilder;

  Vector cycle(int l, const Vector &r, int visits) const;
  Vector residual(int l, const Vector &b, const Vector &x) const;

  HierarchyConfig config_;
  std::vector<Level> levels_;
  std::vector<TransferPair> transfers_;
  CoarsestSolve coarsest_;
  std::vector<std::string> warnings_;
};

//
// Builds the Galerkin hierarchy on a matrix-free fine operator: transfers top-down, K1 by
// element-wise assembly, deeper levels by sparse triple products, floored diagonals and
// power-iteration lambda_max per level, and the coarsest factorization. Depth beyond what
// 2:1 coarsening allows is clamped with a warning.
//
GmgHierarchy build_hierarchy(std::shared_ptr<const FineOperator> op, const HierarchyConfig &cfg,
                             SpectralCache *cache = nullptr);

// Same hierarchy built from an assembled fine matrix, with K1 formed by a sparse triple
// product instead of element-wise assembly.
GmgHierarchy build_assembled_hierarchy(CsrMatrix<double> K0, const StructuredGrid &grid,
                                       const HierarchyConfig &cfg);

// max over trials of |<Mx, y> - <x, My>| / (|x| |y|) with M one V-cycle.
double symmetry_defect(const GmgHierarchy &h, int n_trials, std::uint64_t seed);

}  // namespace gmg

#endif  // GMG_MULTIGRID_HPP
