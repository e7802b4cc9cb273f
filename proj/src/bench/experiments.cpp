// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "gmg/bench.hpp"
#include "gmg/diagnostics.hpp"
#include "gmg/transfer.hpp"

namespace gmg::bench
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string grid_name(const Grid &g)
{
  std::ostringstream s;
  s << g[0] << "x" << g[1] << "x" << g[2];
  return s.str();
}

struct Problem
{
  StructuredGrid grid;
  std::shared_ptr<const FineOperator> op;
};

Problem make_problem(const Grid &g, StateKind kind, double vf, double p, double floor,
                     std::uint64_t seed)
{
  StructuredGrid grid = build_cantilever(g[0], g[1], g[2]);
  const auto rho = make_state(grid, kind, {vf, floor}, seed);
  auto op = std::make_shared<const FineOperator>(grid, simp_modulus(rho, p, SimpParams{}.Emin, SimpParams{}.E0));
  return {std::move(grid), std::move(op)};
}

HierarchyConfig hierarchy_config(const ExperimentSpec &spec, const Cell &cell)
{
  HierarchyConfig cfg;
  cfg.levels = cell.levels;
  cfg.precision = cell.precision;
  cfg.smoother.kind = cell.smoother;
  cfg.smoother.degree = cell.degree;
  cfg.smoother.alpha = spec.alpha;
  cfg.smoother.omega = spec.omega;
  return cfg;
}

SolverConfig solver_config(const ExperimentSpec &spec, const Cell &cell)
{
  SolverConfig cfg;
  cfg.method = effective_method(spec, cell.precision);
  cfg.tol = spec.tol;
  cfg.maxiter = spec.maxiter;
  cfg.restart = cell.restart;
  return cfg;
}

Json solve_json(const SolveReport &rep, double comp)
{
  Json j;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["failure_kind"] = std::string(to_string(rep.failure));
  j["final_true_residual"] = rep.final_true_residual;
  j["happy_breakdown"] = rep.happy_breakdown;
  j["compliance"] = comp;
  j["residual_history"] = rep.residual_history;
  j["solve_seconds"] = rep.wall_time;
  return j;
}

Json probe_json(const SpectralProbe &p)
{
  Json j;
  j["m"] = p.m;
  j["seed"] = p.seed;
  j["steps"] = p.steps;
  j["partial"] = p.partial;
  j["valid"] = p.valid;
  j["ritz_min"] = p.ritz_min;
  j["ritz_max"] = p.ritz_max;
  // inf is not representable in JSON; an invalid probe carries null.
  j["kappa_eff"] = p.valid ? Json(p.kappa_eff) : Json(nullptr);
  j["eps_kappa"] = p.valid ? Json(p.eps_kappa) : Json(nullptr);
  j["bf16_screen"] = bf16_screen(p);
  return j;
}

SpectralProbe probe_hierarchy(const GmgHierarchy &h, const FineOperator &op, int m,
                              std::uint64_t seed)
{
  return lanczos_kappa_eff(h.as_preconditioner(), op.as_function(), op.size(), m, seed);
}

// GMG- or Jacobi-preconditioned solve of one problem; the hierarchy, if any, is rebuilt.
struct SolveOutcome
{
  SolveReport report;
  double setup_seconds = 0.0;
  std::vector<std::string> warnings;
};

SolveOutcome solve_problem(const Problem &pr, const ExperimentSpec &spec, const Cell &cell)
{
  SolveOutcome out;
  const SolverConfig sc = solver_config(spec, cell);
  const Vector b = pr.grid.free_load();
  if (spec.preconditioner == Preconditioner::Jacobi)
  {
    if (sc.method == KrylovMethod::Pcg)
    {
      out.report = flat_jacobi_pcg(*pr.op, b, sc);
    }
    else
    {
      const Vector dinv = fine_diagonal(*pr.op).cwiseInverse();
      out.report = fgmres(pr.op->as_function(),
                          [&dinv](const Vector &r, Vector &z) { z = dinv.cwiseProduct(r); }, b, sc);
    }
    return out;
  }
  const auto t0 = Clock::now();
  const GmgHierarchy h = build_hierarchy(pr.op, hierarchy_config(spec, cell));
  out.setup_seconds = seconds_since(t0);
  out.warnings = h.warnings();
  out.report = solve(pr.op->as_function(), h.as_preconditioner(), b, sc);
  return out;
}

Json aggregate(const std::vector<double> &values)
{
  const auto [mean, stddev] = mean_stddev(values);
  return Json{{"mean", mean}, {"stddev", stddev}};
}

// Aggregate names keep the trial field name so timing aggregates are excluded alongside
// the trial timings.
Json aggregate_trials(const Json &trials)
{
  Json out = Json::object();
  for (const char *field : {"iterations", "final_true_residual", "solve_seconds", "setup_seconds"})
  {
    std::vector<double> v;
    for (const auto &t : trials)
    {
      if (t.contains(field))
      {
        v.push_back(t[field].get<double>());
      }
    }
    if (!v.empty())
    {
      out[std::string(field) == "solve_seconds" || std::string(field) == "setup_seconds"
            ? std::string("mean_stddev_") + field
            : std::string(field)] = aggregate(v);
    }
  }
  return out;
}

Gate make_gate(std::string id, std::string description, double measured, double threshold,
               bool passed)
{
  return Gate{std::move(id), std::move(description), passed, measured, threshold};
}

double rel_diff(double a, double b)
{
  return std::abs(a - b) / std::abs(b);
}

const Cell &single_cell(const std::vector<Cell> &cells)
{
  return cells.front();
}

}  // namespace

RunReport cmd_solve(const ExperimentSpec &spec)
{
  spec.validate();
  RunReport rep;
  rep.spec = to_json(spec);
  const auto cells = expand_cells(spec);
  const Cell &cell = single_cell(cells);
  const Problem pr = make_problem(cell.grid, spec.state, cell.vf, cell.p, spec.floor, spec.seed);

  double worst = 0.0;
  bool all_converged = true;
  for (int t = 0; t < spec.warmups + spec.trials; t++)
  {
    const SolveOutcome so = solve_problem(pr, spec, cell);
    if (t < spec.warmups)
    {
      continue;
    }
    Json j = solve_json(so.report, compliance(pr.grid.free_load(), so.report.x));
    j["trial"] = t - spec.warmups;
    j["setup_seconds"] = so.setup_seconds;
    j["warnings"] = so.warnings;
    rep.trials.push_back(j);
    worst = std::max(worst, so.report.final_true_residual);
    all_converged = all_converged && so.report.converged;
  }
  rep.aggregates = aggregate_trials(rep.trials);
  rep.aggregates["warmups_discarded"] = spec.warmups;
  rep.aggregates["timed_trials"] = spec.trials;
  rep.gates.push_back(make_gate("solve.converged", "every timed solve reaches the true-residual tolerance",
                                worst, spec.tol, all_converged));
  return rep;
}

RunReport cmd_probe(const ExperimentSpec &spec)
{
  spec.validate();
  RunReport rep;
  rep.spec = to_json(spec);
  const Cell cell = single_cell(expand_cells(spec));
  const Problem pr = make_problem(cell.grid, spec.state, cell.vf, cell.p, spec.floor, spec.seed);
  const GmgHierarchy h = build_hierarchy(pr.op, hierarchy_config(spec, cell));
  const auto t0 = Clock::now();
  const SpectralProbe p = probe_hierarchy(h, *pr.op, spec.lanczos_steps, spec.lanczos_seed);
  Json j = probe_json(p);
  j["probe_seconds"] = seconds_since(t0);
  j["levels_built"] = h.num_levels();
  j["warnings"] = h.warnings();
  rep.trials.push_back(j);
  rep.aggregates["kappa_eff"] = j["kappa_eff"];
  rep.gates.push_back(make_gate("M6", "kappa_eff of the preconditioned operator at most 256",
                                p.valid ? p.kappa_eff : std::numeric_limits<double>::max(), 256.0,
                                p.valid && p.kappa_eff <= 256.0));
  return rep;
}

RunReport cmd_sweep(const ExperimentSpec &spec)
{
  spec.validate();
  RunReport rep;
  rep.spec = to_json(spec);
  std::map<std::string, std::array<int, 3>> per_size;  // cells, converged, capped
  std::vector<std::string> size_order;
  int failed = 0;
  for (const Cell &cell : expand_cells(spec))
  {
    const Problem pr = make_problem(cell.grid, spec.state, cell.vf, cell.p, spec.floor, spec.seed);
    const auto t0 = Clock::now();
    const GmgHierarchy h = build_hierarchy(pr.op, hierarchy_config(spec, cell));
    const double setup = seconds_since(t0);
    const SolveReport sr =
      solve(pr.op->as_function(), h.as_preconditioner(), pr.grid.free_load(), solver_config(spec, cell));
    Json j = to_json(cell);
    j["method"] = std::string(to_string(effective_method(spec, cell.precision)));
    j["levels_built"] = h.num_levels();
    j["result"] = solve_json(sr, compliance(pr.grid.free_load(), sr.x));
    j["probe"] = probe_json(probe_hierarchy(h, *pr.op, spec.lanczos_steps, spec.lanczos_seed));
    j["setup_seconds"] = setup;
    rep.trials.push_back(j);

    const std::string key = grid_name(cell.grid);
    if (!per_size.count(key))
    {
      size_order.push_back(key);
    }
    auto &c = per_size[key];
    c[0]++;
    c[1] += sr.converged;
    c[2] += sr.failure == FailureKind::Cap;
    failed += !sr.converged;
  }
  Json sizes = Json::array();
  for (const auto &key : size_order)
  {
    const auto &c = per_size[key];
    sizes.push_back(Json{{"grid", key},
                         {"cells", c[0]},
                         {"converged", c[1]},
                         {"capped", c[2]},
                         {"failure_rate", static_cast<double>(c[0] - c[1]) / c[0]}});
  }
  rep.aggregates["per_size"] = sizes;
  rep.aggregates["cells"] = rep.trials.size();
  rep.gates.push_back(make_gate("sweep.converged", "number of cells that did not converge", failed, 0,
                                failed == 0));
  return rep;
}

RunReport cmd_robustness(const ExperimentSpec &spec)
{
  spec.validate();
  RunReport rep;
  rep.spec = to_json(spec);
  struct Config
  {
    std::string name;
    StateKind kind;
    double vf, p, floor;
    std::uint64_t seed;
    bool must_pass;
  };
  const std::vector<Config> configs{
    {"uniform_vf0.2", StateKind::Uniform, 0.2, 3.0, spec.floor, 0, true},
    {"uniform_vf0.5", StateKind::Uniform, 0.5, 3.0, spec.floor, 0, true},
    {"uniform_vf0.8", StateKind::Uniform, 0.8, 3.0, spec.floor, 0, true},
    {"binary_vf0.2_p1.5", StateKind::Binary, 0.2, 1.5, spec.floor, 7, false},
    {"binary_vf0.5_p3.0", StateKind::Binary, 0.5, 3.0, spec.floor, 11, false},
    {"binary_vf0.8_p4.5", StateKind::Binary, 0.8, 4.5, spec.floor, 13, false},
    {"checkerboard", StateKind::Checkerboard, 0.5, 3.0, spec.floor, 0, false},
    {"layered", StateKind::Layered, 0.5, 3.0, spec.floor, 0, true},
    {"random_floor_1e-12", StateKind::RandomFloor, 0.5, 3.0, 1e-12, 17, false},
    {"mixed_near_void", StateKind::MixedNearVoid, 0.5, 3.0, 1e-3, 19, false},
  };
  Cell cell = single_cell(expand_cells(spec));
  cell.restart = 50;
  ExperimentSpec run_spec = spec;
  run_spec.method = KrylovMethod::Fgmres;
  run_spec.maxiter = 500;

  int required = 0, required_passed = 0, capped_converged = 0, disagreements = 0;
  for (const auto &c : configs)
  {
    const Problem pr = make_problem(cell.grid, c.kind, c.vf, c.p, c.floor, c.seed);
    const GmgHierarchy h = build_hierarchy(pr.op, hierarchy_config(spec, cell));
    const Vector b = pr.grid.free_load();
    const SolveReport sr = solve(pr.op->as_function(), h.as_preconditioner(), b, solver_config(run_spec, cell));
    // Independent FP64 check on a fresh matvec of the returned iterate.
    Vector Kx;
    pr.op->apply(sr.x, Kx);
    const double recomputed = (b - Kx).norm() / b.norm();
    const bool agrees = sr.converged == (std::isfinite(recomputed) && recomputed < spec.tol);

    Json j;
    j["configuration"] = c.name;
    j["state"] = std::string(to_string(c.kind));
    j["vf"] = c.vf;
    j["p"] = c.p;
    j["floor"] = c.floor;
    j["seed"] = c.seed;
    j["result"] = solve_json(sr, compliance(b, sr.x));
    j["status"] = sr.converged ? "pass" : "fail";
    j["recomputed_residual"] = recomputed;
    j["converged_agrees"] = agrees;
    j["probe"] = probe_json(probe_hierarchy(h, *pr.op, spec.lanczos_steps, spec.lanczos_seed));
    rep.trials.push_back(j);

    if (c.must_pass)
    {
      required++;
      required_passed += sr.converged;
    }
    capped_converged += sr.failure == FailureKind::Cap && sr.converged;
    disagreements += !agrees;
  }
  int passes = 0;
  for (const auto &t : rep.trials)
  {
    passes += t["status"] == "pass";
  }
  rep.aggregates["passed"] = passes;
  rep.aggregates["failed"] = static_cast<int>(configs.size()) - passes;
  rep.gates.push_back(make_gate("R1", "uniform and layered configurations converge", required_passed,
                                required, required_passed == required));
  rep.gates.push_back(make_gate("R2", "capped runs never reported converged", capped_converged, 0,
                                capped_converged == 0));
  rep.gates.push_back(make_gate("R3", "converged agrees with an independent FP64 residual", disagreements,
                                0, disagreements == 0));
  return rep;
}

RunReport cmd_validate(const ExperimentSpec &spec)
{
  spec.validate();
  RunReport rep;
  rep.spec = to_json(spec);
  const Grid screen = spec.grids.front();
  const Grid oracle{8, 4, 4};
  auto detail = [&rep](const std::string &id, Json j) {
    j["gate"] = id;
    rep.trials.push_back(std::move(j));
  };
  auto cfg_for = [&spec](PrecisionPolicy prec, int levels) {
    HierarchyConfig cfg;
    cfg.levels = levels;
    cfg.precision = prec;
    cfg.smoother.alpha = spec.alpha;
    cfg.smoother.omega = spec.omega;
    return cfg;
  };
  SolverConfig tight;
  tight.tol = 1e-12;
  tight.maxiter = 500;

  // M1: V-cycle PCG against the dense direct solve.
  {
    const Problem pr = make_problem(oracle, StateKind::Uniform, 0.5, 3.0, spec.floor, spec.seed);
    const auto h = build_hierarchy(pr.op, cfg_for(PrecisionPolicy::FP64, 3));
    const Vector b = pr.grid.free_load();
    const SolveReport sr = pcg(pr.op->as_function(), h.as_preconditioner(), b, tight);
    const DenseMatrix K = assemble_dense(*pr.op);
    const Vector direct = K.llt().solve(b);
    const double res = (b - K * sr.x).norm() / b.norm();
    detail("M1", {{"iterations", sr.iterations},
                  {"relative_residual", res},
                  {"relative_difference_to_direct", (sr.x - direct).norm() / direct.norm()}});
    rep.gates.push_back(make_gate("M1", "FP64 V-cycle PCG relative residual on 8x4x4 below 1e-10", res,
                                  1e-10, res < 1e-10));
  }

  // M2: uniform iteration gate.
  {
    const Problem pr = make_problem(screen, StateKind::Uniform, 0.5, 3.0, spec.floor, spec.seed);
    const auto h = build_hierarchy(pr.op, cfg_for(PrecisionPolicy::FP32, spec.levels.front()));
    const SolveReport sr = pcg(pr.op->as_function(), h.as_preconditioner(), pr.grid.free_load(), SolverConfig{});
    detail("M2", {{"grid", grid_name(screen)}, {"iterations", sr.iterations}, {"converged", sr.converged}});
    rep.gates.push_back(make_gate("M2", "FP32-GMG PCG on the uniform state converges within 30 iterations",
                                  sr.iterations, 30, sr.converged && sr.iterations <= 30));
  }

  // M3: element-wise level-1 assembly against the dense triple product, and compliance of
  // the matrix-free hierarchy against an assembled-fine hierarchy.
  {
    double worst_frob = 0.0, worst_comp = 0.0;
    for (const Grid g : {Grid{4, 2, 2}, Grid{8, 4, 4}})
    {
      const Problem pr = make_problem(g, StateKind::Uniform, 0.5, 3.0, spec.floor, spec.seed);
      const TransferPair t = build_transfer(pr.grid);
      const DenseMatrix K1 = assemble_level1(*pr.op, t).to_dense();
      const DenseMatrix P = t.P.to_dense();
      const DenseMatrix K0 = assemble_dense(*pr.op);
      const DenseMatrix ref = P.transpose() * K0 * P;
      const double frob = (K1 - ref).norm() / ref.norm();

      const Vector b = pr.grid.free_load();
      const auto mf = build_hierarchy(pr.op, cfg_for(PrecisionPolicy::FP64, 2));
      const auto as = build_assembled_hierarchy(CsrMatrix<double>::from_dense(K0), pr.grid,
                                                cfg_for(PrecisionPolicy::FP64, 2));
      const SolveReport a = pcg(pr.op->as_function(), mf.as_preconditioner(), b, tight);
      const SolveReport c = pcg(pr.op->as_function(), as.as_preconditioner(), b, tight);
      const double comp = rel_diff(compliance(b, a.x), compliance(b, c.x));
      detail("M3", {{"grid", grid_name(g)}, {"relative_frobenius", frob}, {"compliance_relative_difference", comp}});
      worst_frob = std::max(worst_frob, frob);
      worst_comp = std::max(worst_comp, comp);
    }
    rep.gates.push_back(make_gate("M3", "matrix-free vs assembled Galerkin compliance difference below 0.1%",
                                  worst_comp, 1e-3, worst_comp < 1e-3));
    rep.gates.push_back(make_gate("M3.operator", "level-1 assembly vs dense triple product, relative Frobenius",
                                  worst_frob, 1e-10, worst_frob < 1e-10));
  }

  // M4: smoother variants.
  {
    const Problem pr = make_problem(screen, StateKind::Uniform, 0.5, 3.0, spec.floor, spec.seed);
    int worst = 0;
    bool ok = true;
    for (auto [kind, degree] : {std::pair{SmootherKind::Chebyshev, 2}, std::pair{SmootherKind::Chebyshev, 4},
                                std::pair{SmootherKind::Jacobi, 2}})
    {
      HierarchyConfig cfg = cfg_for(PrecisionPolicy::FP32, spec.levels.front());
      cfg.smoother.kind = kind;
      cfg.smoother.degree = degree;
      const auto h = build_hierarchy(pr.op, cfg);
      const SolveReport sr = pcg(pr.op->as_function(), h.as_preconditioner(), pr.grid.free_load(), SolverConfig{});
      detail("M4", {{"smoother", std::string(to_string(kind))},
                    {"degree", degree},
                    {"iterations", sr.iterations},
                    {"converged", sr.converged}});
      worst = std::max(worst, sr.iterations);
      ok = ok && sr.converged && sr.iterations <= 50;
    }
    rep.gates.push_back(make_gate("M4", "Chebyshev degree 2/4 and Jacobi smoothers converge within 50 iterations",
                                  worst, 50, ok));
  }

  // M5: SIMP sanity. Uniform states scale K by E(rho), so compliance times E is invariant.
  {
    const SimpParams sp;
    bool endpoints = true;
    double worst = 0.0, reference = 0.0;
    for (double p : {3.0, 1.5, 4.5})
    {
      const ModulusField ends = simp_modulus(DensityField{{0.0, 1.0}, "endpoints"}, p, sp.Emin, sp.E0);
      endpoints = endpoints && ends.E[0] == sp.Emin && ends.E[1] == sp.E0;
      const Problem pr = make_problem(oracle, StateKind::Uniform, 0.5, p, spec.floor, spec.seed);
      const auto h = build_hierarchy(pr.op, cfg_for(PrecisionPolicy::FP64, 3));
      const Vector b = pr.grid.free_load();
      const SolveReport sr = pcg(pr.op->as_function(), h.as_preconditioner(), b, tight);
      const double scaled = compliance(b, sr.x) * pr.op->modulus().E.front();
      if (reference == 0.0)
      {
        reference = scaled;
      }
      worst = std::max(worst, rel_diff(scaled, reference));
      endpoints = endpoints && sr.converged;
      detail("M5", {{"p", p}, {"compliance", compliance(b, sr.x)}, {"iterations", sr.iterations}});
    }
    const double measured = endpoints ? worst : std::numeric_limits<double>::max();
    rep.gates.push_back(make_gate("M5", "SIMP endpoints exact and compliance scales as 1/E(rho) for p in {1.5, 3, 4.5}",
                                  measured, 1e-6, endpoints && worst < 1e-6));
  }

  // M6: spectral probe on the nominal uniform state.
  {
    const Problem pr = make_problem(screen, StateKind::Uniform, 0.5, 3.0, spec.floor, spec.seed);
    const auto h = build_hierarchy(pr.op, cfg_for(PrecisionPolicy::FP64, spec.levels.front()));
    const SpectralProbe p = probe_hierarchy(h, *pr.op, spec.lanczos_steps, spec.lanczos_seed);
    Json j = probe_json(p);
    j["grid"] = grid_name(screen);
    detail("M6", j);
    rep.gates.push_back(make_gate("M6", "kappa_eff of the FP64 V-cycle-preconditioned operator at most 256",
                                  p.valid ? p.kappa_eff : std::numeric_limits<double>::max(), 256.0,
                                  p.valid && p.kappa_eff <= 256.0));
  }

  // M7 and M8: reduced-precision hierarchies against the FP64 compliance.
  {
    const Problem pr = make_problem(oracle, StateKind::Uniform, 0.5, 3.0, spec.floor, spec.seed);
    const Vector b = pr.grid.free_load();
    const double c64 = compliance(b, assemble_dense(*pr.op).llt().solve(b));

    SolverConfig fg;
    fg.method = KrylovMethod::Fgmres;
    const auto hb = build_hierarchy(pr.op, cfg_for(PrecisionPolicy::BF16, 3));
    const SolveReport bf = fgmres(pr.op->as_function(), hb.as_preconditioner(), b, fg);
    const double ebf = rel_diff(compliance(b, bf.x), c64);
    detail("M7", {{"iterations", bf.iterations}, {"converged", bf.converged}, {"compliance_relative_error", ebf}});
    rep.gates.push_back(make_gate("M7", "BF16EMU-GMG FGMRES compliance within 0.5% of FP64", ebf, 5e-3,
                                  bf.converged && ebf <= 5e-3));

    const auto h32 = build_hierarchy(pr.op, cfg_for(PrecisionPolicy::FP32, 3));
    const SolveReport s32 = pcg(pr.op->as_function(), h32.as_preconditioner(), b, SolverConfig{});
    const double e32 = rel_diff(compliance(b, s32.x), c64);
    detail("M8", {{"levels_built", h32.num_levels()},
                  {"iterations", s32.iterations},
                  {"converged", s32.converged},
                  {"compliance_relative_error", e32}});
    rep.gates.push_back(make_gate("M8", "three-level FP32 hierarchy compliance within 0.5% of FP64", e32, 5e-3,
                                  s32.converged && h32.num_levels() == 3 && e32 <= 5e-3));
  }

  int passed = 0;
  for (const auto &g : rep.gates)
  {
    passed += g.passed;
  }
  rep.aggregates["gates_passed"] = passed;
  rep.aggregates["gates_total"] = rep.gates.size();
  return rep;
}

RunReport run(const ExperimentSpec &spec)
{
  if (spec.command == "validate")
  {
    return cmd_validate(spec);
  }
  if (spec.command == "sweep")
  {
    return cmd_sweep(spec);
  }
  if (spec.command == "probe")
  {
    return cmd_probe(spec);
  }
  if (spec.command == "robustness")
  {
    return cmd_robustness(spec);
  }
  return cmd_solve(spec);
}

}  // namespace gmg::bench
