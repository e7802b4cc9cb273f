// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_DIAGNOSTICS_HPP
#define GMG_DIAGNOSTICS_HPP

#include <cstdint>

#include "gmg/bf16.hpp"
#include "gmg/operator.hpp"

namespace gmg
{

inline constexpr int kDefaultLanczosSteps = 40;

struct SpectralProbe
{
  int m = kDefaultLanczosSteps;
  std::uint64_t seed = 0;
  int steps = 0;         // Lanczos steps actually taken
  bool partial = false;  // stopped early on a zero beta
  bool valid = false;    // smallest Ritz value positive
  double ritz_min = 0.0;
  double ritz_max = 0.0;
  double kappa_eff = 0.0;
  double eps_kappa = 0.0;
};

//
// m-step Lanczos on the preconditioned operator M K from a seeded normalized Gaussian
// start, with full reorthogonalization. kappa_eff is the ratio of the extreme Ritz values.
//
// The two-operator form runs in the K inner product, where M K is self-adjoint whenever M
// is symmetric; the single-operator form treats apply_MK as self-adjoint in the Euclidean
// inner product.
//
SpectralProbe lanczos_kappa_eff(const ApplyFn &apply_M, const ApplyFn &apply_K, Index n,
                                int m = kDefaultLanczosSteps, std::uint64_t seed = 0);

SpectralProbe lanczos_kappa_eff(const ApplyFn &apply_MK, Index n, int m = kDefaultLanczosSteps,
                                std::uint64_t seed = 0);

// eps_BF16 * kappa_eff < 1. A spectral proxy only, never a convergence verdict.
inline bool bf16_screen(const SpectralProbe &probe)
{
  return probe.valid && probe.eps_kappa < 1.0;
}

// (1 + rho) / (1 - rho) for a V-cycle error-propagation radius rho in [0, 1).
double kappa_bound(double rho);

}  // namespace gmg

#endif  // GMG_DIAGNOSTICS_HPP
