// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_KRYLOV_HPP
#define GMG_KRYLOV_HPP

#include <string_view>
#include <vector>

#include "gmg/element.hpp"
#include "gmg/operator.hpp"

namespace gmg
{

enum class KrylovMethod
{
  Pcg,
  Fgmres
};

std::string_view to_string(KrylovMethod method);
KrylovMethod parse_krylov_method(std::string_view name);

enum class FailureKind
{
  None,
  Cap,
  Stagnation,
  NonFinite
};

std::string_view to_string(FailureKind kind);

inline constexpr double kHappyBreakdown = 1e-14;
inline constexpr int kStagnationWindow = 50;

struct SolverConfig
{
  KrylovMethod method = KrylovMethod::Pcg;
  double tol = 1e-6;
  int maxiter = 200;
  int restart = 32;
  bool record_history = true;
  // No 1% gain in the best residual over this many iterations stops the solve; 0 disables.
  int stagnation_window = kStagnationWindow;

  void validate() const;
};

struct SolveReport
{
  Vector x;
  bool converged = false;
  int iterations = 0;
  // Relative recurrence residual after each iteration (index 0 is the initial residual).
  std::vector<double> residual_history;
  double final_true_residual = 0.0;
  double wall_time = 0.0;
  FailureKind failure = FailureKind::None;
  bool happy_breakdown = false;
};

// ||b - K x|| / ||b|| in FP64.
double true_relative_residual(const ApplyFn &apply_K, const Vector &b, const Vector &x);

// Left-preconditioned conjugate gradients from x0 = 0.
SolveReport pcg(const ApplyFn &apply_K, const ApplyFn &apply_M, const Vector &b,
                const SolverConfig &cfg);

// Restarted right-preconditioned flexible GMRES from x0 = 0.
SolveReport fgmres(const ApplyFn &apply_K, const ApplyFn &apply_M, const Vector &b,
                   const SolverConfig &cfg);

// Dispatch on cfg.method.
SolveReport solve(const ApplyFn &apply_K, const ApplyFn &apply_M, const Vector &b,
                  const SolverConfig &cfg);

// PCG with the inverse fine diagonal as preconditioner. A baseline comparator: it always
// runs to convergence or the cap, so stagnation detection is off.
SolveReport flat_jacobi_pcg(const FineOperator &op, const Vector &b, const SolverConfig &cfg);

}  // namespace gmg

#endif  // GMG_KRYLOV_HPP
