// SPDX-License-Identifier: Apache-2.0

#include "gmg/multigrid.hpp"

#include <cmath>

#include "gmg/rng.hpp"

namespace gmg
{

std::string_view to_string(PrecisionPolicy policy)
{
  switch (policy)
  {
    case PrecisionPolicy::FP64:
      return "fp64";
    case PrecisionPolicy::FP32:
      return "fp32";
    case PrecisionPolicy::BF16:
      return "bf16";
  }
  return "?";
}

PrecisionPolicy parse_precision_policy(std::string_view name)
{
  switch (parse_precision_tag(name))
  {
    case PrecisionTag::FP64:
      return PrecisionPolicy::FP64;
    case PrecisionTag::FP32:
      return PrecisionPolicy::FP32;
    case PrecisionTag::BF16EMU:
      return PrecisionPolicy::BF16;
  }
  return PrecisionPolicy::FP64;
}

PrecisionTag level_precision(PrecisionPolicy policy, int level)
{
  switch (policy)
  {
    case PrecisionPolicy::FP64:
      return PrecisionTag::FP64;
    case PrecisionPolicy::FP32:
      return level == 0 ? PrecisionTag::FP32 : PrecisionTag::FP64;
    case PrecisionPolicy::BF16:
      return level == 0 ? PrecisionTag::BF16EMU
                        : (level == 1 ? PrecisionTag::FP32 : PrecisionTag::FP64);
  }
  return PrecisionTag::FP64;
}

double coarsest_regularization(double mean_diag)
{
  return std::max(mean_diag * 1e-8, 1e-14);
}

bool SpectralCache::reusable(double new_max_modulus, std::size_t levels) const
{
  if (lambdas.size() != levels || !(max_modulus > 0.0))
  {
    return false;
  }
  return std::abs(new_max_modulus - max_modulus) <= 0.1 * max_modulus;
}

namespace
{

DenseMatrix dense_of(const LinearOperator &op)
{
  if (const auto *sparse = dynamic_cast<const SparseOperator *>(&op))
  {
    return sparse->matrix().to_dense();
  }
  if (const auto *fine = dynamic_cast<const FineOperator *>(&op))
  {
    return assemble_dense(*fine);
  }
  const Index n = op.size();
  DenseMatrix A(n, n);
  Vector e = Vector::Zero(n), col(n);
  for (Index j = 0; j < n; j++)
  {
    e[j] = 1.0;
    op.apply(e, col);
    A.col(j) = col;
    e[j] = 0.0;
  }
  return A;
}

}  // namespace

class HierarchyBuilder
{
public:
  // K1 from the fine operator and its transfer.
  using Level1Fn = std::function<CsrMatrix<double>(const TransferPair &)>;

  static GmgHierarchy build(std::shared_ptr<const LinearOperator> fine, const StructuredGrid &grid,
                            Vector fine_diag, const Level1Fn &level1, const HierarchyConfig &cfg,
                            double max_modulus, SpectralCache *cache)
  {
    if (cfg.levels < 1)
    {
      throw std::invalid_argument("hierarchy needs at least one level");
    }
    cfg.smoother.validate();
    if (!(cfg.lambda_safety >= 1.0))
    {
      throw std::invalid_argument("lambda_max safety factor must be at least 1");
    }

    GmgHierarchy h;
    h.config_ = cfg;
    h.levels_.push_back(Level{std::move(fine), grid, fine_diag.cwiseInverse(), 1.0,
                              level_precision(cfg.precision, 0)});

    while (h.num_levels() < cfg.levels)
    {
      const Level &cur = h.levels_.back();
      TransferPair transfer;
      try
      {
        transfer = build_transfer(cur.grid);
      }
      catch (const CoarseningUnavailable &err)
      {
        h.warnings_.push_back("depth clamped to " + std::to_string(h.num_levels()) +
                              " levels: " + err.what());
        break;
      }
      if (transfer.coarse_size() == 0 || transfer.coarse_size() >= transfer.fine_size())
      {
        h.warnings_.push_back("depth clamped to " + std::to_string(h.num_levels()) +
                              " levels: coarse space would not shrink");
        break;
      }
      CsrMatrix<double> Kc;
      if (h.num_levels() == 1)
      {
        Kc = level1(transfer);
      }
      else
      {
        const auto &prev = static_cast<const SparseOperator &>(*cur.op);
        Kc = triple_product(transfer.P, prev.matrix());
      }
      const int l = h.num_levels();
      Vector diag = floor_diagonal(Kc.diagonal());
      StructuredGrid coarse_grid = transfer.coarse;
      h.transfers_.push_back(std::move(transfer));
      h.levels_.push_back(Level{std::make_shared<SparseOperator>(std::move(Kc)),
                                std::move(coarse_grid), diag.cwiseInverse(), 1.0,
                                level_precision(cfg.precision, l)});
    }

    // The coarsest level is solved directly, so it needs no smoother estimate.
    const std::size_t smoothed = h.levels_.size() - 1;
    if (cache && cache->reusable(max_modulus, smoothed))
    {
      for (std::size_t l = 0; l < smoothed; l++)
      {
        h.levels_[l].lambda_max = cache->lambdas[l];
      }
    }
    else
    {
      std::vector<double> lambdas;
      for (std::size_t l = 0; l < smoothed; l++)
      {
        Level &lev = h.levels_[l];
        const int iters = l == 0 ? cfg.power_iters_fine : cfg.power_iters_coarse;
        lev.lambda_max = estimate_lambda_max(*lev.op, lev.diag_inv, iters, cfg.power_seed + l);
        lambdas.push_back(lev.lambda_max);
      }
      if (cache)
      {
        cache->max_modulus = max_modulus;
        cache->lambdas = std::move(lambdas);
      }
    }

    prepare_coarsest(h);
    return h;
  }

private:
  static void prepare_coarsest(GmgHierarchy &h)
  {
    const Level &last = h.levels_.back();
    const Vector diag = last.diag_inv.cwiseInverse();
    CoarsestSolve &cs = h.coarsest_;
    cs.epsilon = coarsest_regularization(diag.size() ? diag.mean() : 0.0);
    cs.pcg_steps = h.config_.coarsest_pcg_steps;
    cs.mode = CoarsestSolve::Mode::Pcg;
    if (last.op->size() <= h.config_.dense_limit)
    {
      DenseMatrix A = dense_of(*last.op);
      A.diagonal().array() += cs.epsilon;
      cs.factor.compute(A);
      if (cs.factor.info() == Eigen::Success)
      {
        cs.mode = CoarsestSolve::Mode::DenseCholesky;
      }
      else
      {
        h.warnings_.push_back("coarsest Cholesky failed; using fixed-step PCG");
      }
    }
  }
};

GmgHierarchy build_hierarchy(std::shared_ptr<const FineOperator> op, const HierarchyConfig &cfg,
                             SpectralCache *cache)
{
  const FineOperator &fine = *op;
  Vector diag = fine_diagonal(fine);
  return HierarchyBuilder::build(
    op, fine.grid(), std::move(diag),
    [&fine](const TransferPair &t) { return assemble_level1(fine, t); }, cfg,
    fine.modulus().max(), cache);
}

GmgHierarchy build_assembled_hierarchy(CsrMatrix<double> K0, const StructuredGrid &grid,
                                       const HierarchyConfig &cfg)
{
  auto op = std::make_shared<SparseOperator>(std::move(K0));
  Vector diag = floor_diagonal(op->matrix().diagonal());
  return HierarchyBuilder::build(
    op, grid, std::move(diag),
    [&op](const TransferPair &t) { return triple_product(t.P, op->matrix()); }, cfg, 0.0,
    nullptr);
}

Vector GmgHierarchy::coarsest_solve(const Vector &r) const
{
  if (coarsest_.mode == CoarsestSolve::Mode::DenseCholesky)
  {
    return coarsest_.factor.solve(r);
  }
  // Fixed-step Jacobi-preconditioned CG on K_L + eps I.
  const Level &lev = levels_.back();
  const double eps = coarsest_.epsilon;
  const Vector dinv = (lev.diag_inv.cwiseInverse().array() + eps).inverse().matrix();
  Vector x = Vector::Zero(r.size());
  Vector res = r, z = dinv.cwiseProduct(res), p = z, q(r.size());
  double rz = res.dot(z);
  for (int it = 0; it < coarsest_.pcg_steps && rz > 0.0; it++)
  {
    lev.op->apply(p, q);
    q += eps * p;
    const double pq = p.dot(q);
    if (!(pq > 0.0))
    {
      break;
    }
    const double step = rz / pq;
    x += step * p;
    res -= step * q;
    z = dinv.cwiseProduct(res);
    const double rz_new = res.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return x;
}

Vector GmgHierarchy::smooth(int l, const Vector &b, const Vector &x) const
{
  const Level &lev = levels_[l];
  const SmootherConfig &sc = config_.smoother;
  const int steps = l == 0 ? sc.degree : sc.coarse_steps;
  if (sc.kind == SmootherKind::Chebyshev)
  {
    return chebyshev_smooth(*lev.op, b, x, lev.diag_inv, config_.lambda_safety * lev.lambda_max,
                            steps, sc.alpha, lev.precision);
  }
  return jacobi_smooth(*lev.op, b, x, lev.diag_inv, sc.omega, steps, lev.precision);
}

Vector GmgHierarchy::residual(int l, const Vector &b, const Vector &x) const
{
  const Level &lev = levels_[l];
  Vector Kx(b.size());
  // Only the assembled levels run their residual matvec below FP64.
  if (l == 0 || lev.precision == PrecisionTag::FP64)
  {
    lev.op->apply(x, Kx);
  }
  else
  {
    VectorF yf;
    lev.op->apply(VectorF(x.cast<float>()), yf, lev.precision);
    Kx = yf.cast<double>();
  }
  return b - Kx;
}

Vector GmgHierarchy::cycle(int l, const Vector &r, int visits) const
{
  if (l == num_levels() - 1)
  {
    return coarsest_solve(r);
  }
  const TransferPair &t = transfers_[l];
  Vector x = smooth(l, r, Vector::Zero(r.size()));
  Vector rc, ec, ef;
  for (int v = 0; v < visits; v++)
  {
    restrict_to_coarse(t, residual(l, r, x), rc);
    ec = cycle(l + 1, rc, visits);
    prolongate(t, ec, ef);
    x += ef;
  }
  return smooth(l, r, x);
}

Vector GmgHierarchy::vcycle(const Vector &r) const
{
  if (r.size() != fine_size())
  {
    throw std::invalid_argument("vcycle: residual length does not match fine level");
  }
  return cycle(0, r, 1);
}

Vector GmgHierarchy::wcycle(const Vector &r) const
{
  if (r.size() != fine_size())
  {
    throw std::invalid_argument("wcycle: residual length does not match fine level");
  }
  return cycle(0, r, 2);
}

ApplyFn GmgHierarchy::as_preconditioner(bool w_cycle) const
{
  if (w_cycle)
  {
    return [this](const Vector &r, Vector &z) { z = wcycle(r); };
  }
  return [this](const Vector &r, Vector &z) { z = vcycle(r); };
}

double symmetry_defect(const GmgHierarchy &h, int n_trials, std::uint64_t seed)
{
  if (n_trials < 1)
  {
    throw std::invalid_argument("symmetry defect needs at least one trial");
  }
  SplitMix64 rng(seed);
  const Index n = h.fine_size();
  double worst = 0.0;
  for (int t = 0; t < n_trials; t++)
  {
    Vector x(n), y(n);
    for (Index i = 0; i < n; i++)
    {
      x[i] = rng.gaussian();
    }
    for (Index i = 0; i < n; i++)
    {
      y[i] = rng.gaussian();
    }
    const double lhs = h.vcycle(x).dot(y);
    const double rhs = x.dot(h.vcycle(y));
    worst = std::max(worst, std::abs(lhs - rhs) / (x.norm() * y.norm()));
  }
  return worst;
}

}  // namespace gmg
