// SPDX-License-Identifier: Apache-2.0

#include "gmg/krylov.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/Dense>

namespace gmg
{

std::string_view to_string(KrylovMethod method)
{
  return method == KrylovMethod::Pcg ? "pcg" : "fgmres";
}

KrylovMethod parse_krylov_method(std::string_view name)
{
  if (name == "pcg")
  {
    return KrylovMethod::Pcg;
  }
  if (name == "fgmres")
  {
    return KrylovMethod::Fgmres;
  }
  throw std::invalid_argument("unknown Krylov method: " + std::string(name));
}

std::string_view to_string(FailureKind kind)
{
  switch (kind)
  {
    case FailureKind::None:
      return "none";
    case FailureKind::Cap:
      return "cap";
    case FailureKind::Stagnation:
      return "stagnation";
    case FailureKind::NonFinite:
      return "non_finite";
  }
  return "?";
}

void SolverConfig::validate() const
{
  if (!(tol > 0.0))
  {
    throw std::invalid_argument("tolerance must be positive");
  }
  if (maxiter < 1 || restart < 1)
  {
    throw std::invalid_argument("maxiter and restart must be at least 1");
  }
  if (stagnation_window < 0)
  {
    throw std::invalid_argument("stagnation window must be non-negative");
  }
}

double true_relative_residual(const ApplyFn &apply_K, const Vector &b, const Vector &x)
{
  Vector Kx(b.size());
  apply_K(x, Kx);
  const double bnorm = b.norm();
  const double rnorm = (b - Kx).norm();
  return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

namespace
{

using Clock = std::chrono::steady_clock;

// Tracks the best relative residual so far; flags no 1% improvement over the window.
class StagnationMonitor
{
public:
  explicit StagnationMonitor(int window) : window_(window) {}

  bool push(double rel)
  {
    best_.push_back(best_.empty() ? rel : std::min(best_.back(), rel));
    const std::size_t n = best_.size();
    return window_ > 0 && n > static_cast<std::size_t>(window_) &&
           best_[n - 1] > 0.99 * best_[n - 1 - window_];
  }

private:
  int window_;
  std::vector<double> best_;
};

void finish(SolveReport &rep, const ApplyFn &apply_K, const Vector &b, const SolverConfig &cfg,
            Clock::time_point start)
{
  rep.final_true_residual = true_relative_residual(apply_K, b, rep.x);
  rep.converged = std::isfinite(rep.final_true_residual) && rep.final_true_residual < cfg.tol;
  if (rep.converged)
  {
    rep.failure = FailureKind::None;
  }
  else if (rep.failure == FailureKind::None)
  {
    rep.failure = std::isfinite(rep.final_true_residual) ? FailureKind::Cap : FailureKind::NonFinite;
  }
  rep.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
}

bool all_finite(const Vector &v)
{
  return v.allFinite();
}

}  // namespace

SolveReport pcg(const ApplyFn &apply_K, const ApplyFn &apply_M, const Vector &b,
                const SolverConfig &cfg)
{
  cfg.validate();
  const auto start = Clock::now();
  SolveReport rep;
  const Index n = b.size();
  rep.x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (!std::isfinite(bnorm))
  {
    rep.failure = FailureKind::NonFinite;
    finish(rep, apply_K, b, cfg, start);
    return rep;
  }
  if (bnorm == 0.0)
  {
    rep.residual_history.push_back(0.0);
    finish(rep, apply_K, b, cfg, start);
    return rep;
  }

  Vector r = b, z(n), p(n), q(n);
  apply_M(r, z);
  p = z;
  double rz = r.dot(z);
  if (cfg.record_history)
  {
    rep.residual_history.push_back(1.0);
  }
  StagnationMonitor stagnation(cfg.stagnation_window);
  stagnation.push(1.0);

  for (int it = 1; it <= cfg.maxiter; it++)
  {
    apply_K(p, q);
    const double pq = p.dot(q);
    if (!std::isfinite(pq) || !std::isfinite(rz))
    {
      rep.failure = FailureKind::NonFinite;
      break;
    }
    if (pq == 0.0)
    {
      break;
    }
    const double step = rz / pq;
    rep.x += step * p;
    r -= step * q;
    rep.iterations = it;
    double rel = r.norm() / bnorm;
    if (!std::isfinite(rel) || !all_finite(rep.x))
    {
      rep.failure = FailureKind::NonFinite;
      break;
    }
    if (rel < cfg.tol)
    {
      // Accept only on the true residual; otherwise continue from the replaced residual.
      Vector Kx(n);
      apply_K(rep.x, Kx);
      r = b - Kx;
      rel = r.norm() / bnorm;
      if (cfg.record_history)
      {
        rep.residual_history.push_back(rel);
      }
      if (rel < cfg.tol)
      {
        break;
      }
    }
    else if (cfg.record_history)
    {
      rep.residual_history.push_back(rel);
    }
    if (stagnation.push(rel))
    {
      rep.failure = FailureKind::Stagnation;
      break;
    }
    apply_M(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  finish(rep, apply_K, b, cfg, start);
  return rep;
}

SolveReport fgmres(const ApplyFn &apply_K, const ApplyFn &apply_M, const Vector &b,
                   const SolverConfig &cfg)
{
  cfg.validate();
  const auto start = Clock::now();
  SolveReport rep;
  const Index n = b.size();
  rep.x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (!std::isfinite(bnorm))
  {
    rep.failure = FailureKind::NonFinite;
    finish(rep, apply_K, b, cfg, start);
    return rep;
  }
  if (bnorm == 0.0)
  {
    rep.residual_history.push_back(0.0);
    finish(rep, apply_K, b, cfg, start);
    return rep;
  }

  const int m = cfg.restart;
  std::vector<Vector> V(m + 1, Vector(n)), Z(m, Vector(n));
  DenseMatrix H(m + 1, m), Hraw(m + 1, m);
  Vector g(m + 1), cs(m), sn(m), w(n), Kx(n);
  StagnationMonitor stagnation(cfg.stagnation_window);
  bool first = true;
  bool stop = false;

  while (!stop && rep.iterations < cfg.maxiter)
  {
    apply_K(rep.x, Kx);
    const Vector r = b - Kx;
    const double beta = r.norm();
    const double rel0 = beta / bnorm;
    if (!std::isfinite(rel0))
    {
      rep.failure = FailureKind::NonFinite;
      break;
    }
    if (first)
    {
      if (cfg.record_history)
      {
        rep.residual_history.push_back(rel0);
      }
      stagnation.push(rel0);
      first = false;
    }
    if (rel0 < cfg.tol)
    {
      break;
    }

    V[0] = r / beta;
    g.setZero();
    g[0] = beta;
    H.setZero();
    Hraw.setZero();
    int k = 0;
    bool happy = false;
    for (int j = 0; j < m && rep.iterations < cfg.maxiter; j++)
    {
      apply_M(V[j], Z[j]);
      apply_K(Z[j], w);
      const double wnorm0 = w.norm();
      for (int i = 0; i <= j; i++)
      {
        H(i, j) = w.dot(V[i]);
        w -= H(i, j) * V[i];
      }
      H(j + 1, j) = w.norm();
      Hraw.col(j) = H.col(j);

      for (int i = 0; i < j; i++)
      {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = denom > 0.0 ? H(j, j) / denom : 1.0;
      sn[j] = denom > 0.0 ? H(j + 1, j) / denom : 0.0;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      rep.iterations++;
      k = j + 1;
      const double rel = std::abs(g[j + 1]) / bnorm;
      if (cfg.record_history)
      {
        rep.residual_history.push_back(rel);
      }
      if (!std::isfinite(rel) || !std::isfinite(Hraw(j + 1, j)))
      {
        rep.failure = FailureKind::NonFinite;
        stop = true;
        break;
      }
      if (Hraw(j + 1, j) <= kHappyBreakdown * wnorm0)
      {
        happy = true;
        break;
      }
      V[j + 1] = w / Hraw(j + 1, j);
      if (rel < cfg.tol)
      {
        break;
      }
      if (stagnation.push(rel))
      {
        rep.failure = FailureKind::Stagnation;
        stop = true;
        break;
      }
    }
    if (k == 0 || rep.failure == FailureKind::NonFinite)
    {
      break;
    }

    // Least-squares update from the rotated triangle, or a minimum-norm solve of the raw
    // Hessenberg system when the triangle is singular.
    const auto R = H.topLeftCorner(k, k);
    const double rmax = R.diagonal().cwiseAbs().maxCoeff();
    const bool singular = !(rmax > 0.0) || R.diagonal().cwiseAbs().minCoeff() <= 1e-14 * rmax;
    Vector y;
    if (!singular)
    {
      y = R.triangularView<Eigen::Upper>().solve(g.head(k));
    }
    else
    {
      Vector rhs = Vector::Zero(k + 1);
      rhs[0] = beta;
      y = Eigen::CompleteOrthogonalDecomposition<DenseMatrix>(Hraw.topLeftCorner(k + 1, k))
            .solve(rhs);
    }
    for (int i = 0; i < k; i++)
    {
      rep.x += y[i] * Z[i];
    }
    if (!rep.x.allFinite())
    {
      rep.failure = FailureKind::NonFinite;
      break;
    }
    rep.happy_breakdown = rep.happy_breakdown || happy;
  }
  finish(rep, apply_K, b, cfg, start);
  return rep;
}

SolveReport solve(const ApplyFn &apply_K, const ApplyFn &apply_M, const Vector &b,
                  const SolverConfig &cfg)
{
  return cfg.method == KrylovMethod::Pcg ? pcg(apply_K, apply_M, b, cfg)
                                         : fgmres(apply_K, apply_M, b, cfg);
}

SolveReport flat_jacobi_pcg(const FineOperator &op, const Vector &b, const SolverConfig &cfg)
{
  const Vector dinv = fine_diagonal(op).cwiseInverse();
  SolverConfig fixed_cap = cfg;
  fixed_cap.stagnation_window = 0;
  return pcg(op.as_function(), [&dinv](const Vector &r, Vector &z) { z = dinv.cwiseProduct(r); },
             b, fixed_cap);
}

}  // namespace gmg
