// SPDX-License-Identifier: Apache-2.0
//
// gmgbench: validation gates and desk-scale experiments. Exit codes: 0 all gates passed,
// 1 a gate or solve failed, 2 invalid spec.

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "gmg/bench.hpp"

namespace
{

// Doubles are written in shortest round-trip form, so parsing a report back is exact.
std::string dump(const gmg::bench::Json &j)
{
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char **argv)
{
  using namespace gmg::bench;

  CLI::App app{"Galerkin geometric multigrid benchmark driver"};
  app.require_subcommand(1);

  struct Sub
  {
    CLI::App *app;
    std::string config;
    std::map<std::string, std::string> values;
  };
  std::vector<Sub> subs;
  subs.reserve(5);
  const std::map<std::string, std::string> help{
    {"validate", "run the validation gates M1-M8"},
    {"solve", "warm-ups then timed solves of one state"},
    {"sweep", "one solve and spectral probe per parameter cell"},
    {"probe", "Lanczos kappa_eff of the preconditioned operator"},
    {"robustness", "the ten robustness configurations, FGMRES(50) capped at 500"},
  };
  for (const char *name : {"validate", "solve", "sweep", "probe", "robustness"})
  {
    subs.push_back(Sub{app.add_subcommand(name, help.at(name)), "", {}});
  }
  const std::map<std::string, std::string> flag_help{
    {"grid", "NX,NY,NZ elements; ';' separates several grids"},
    {"state", "uniform|binary|checkerboard|layered|random_floor|mixed_near_void"},
    {"vf", "volume fraction"},
    {"p", "SIMP penalty"},
    {"floor", "density floor of void elements"},
    {"seed", "state seed"},
    {"method", "auto|pcg|fgmres (auto: fgmres for bf16, else pcg)"},
    {"preconditioner", "gmg|jacobi"},
    {"precision", "fp64|fp32|bf16"},
    {"levels", "requested hierarchy depth"},
    {"smoother", "chebyshev|jacobi"},
    {"degree", "fine-level Chebyshev degree or Jacobi sweeps"},
    {"alpha", "Chebyshev lower band fraction"},
    {"omega", "Jacobi damping"},
    {"restart", "FGMRES restart length"},
    {"tol", "relative true-residual tolerance"},
    {"maxiter", "iteration cap"},
    {"trials", "timed trials"},
    {"warmups", "discarded warm-up solves"},
    {"lanczos_steps", "Lanczos steps of the spectral probe"},
    {"lanczos_seed", "Lanczos start-vector seed"},
    {"out", "report file (default stdout)"},
  };
  for (auto &s : subs)
  {
    s.app->add_option("--config", s.config, "key=value config file; flags override it");
    for (const auto &key : spec_keys())
    {
      const auto it = flag_help.find(key);
      s.app->add_option("--" + key, s.values[key], it == flag_help.end() ? "" : it->second);
    }
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    app.exit(e);
    return 2;
  }

  ExperimentSpec spec;
  try
  {
    for (auto &s : subs)
    {
      if (!s.app->parsed())
      {
        continue;
      }
      spec.command = s.app->get_name();
      if (!s.config.empty())
      {
        for (const auto &[k, v] : read_config_file(s.config))
        {
          apply_key(spec, k, v);
        }
      }
      for (const auto &key : spec_keys())
      {
        if (s.app->get_option("--" + key)->count() > 0)
        {
          apply_key(spec, key, s.values[key]);
        }
      }
    }
    spec.validate();
  }
  catch (const InvalidSpec &e)
  {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return 2;
  }

  RunReport report;
  try
  {
    report = run(spec);
  }
  catch (const InvalidSpec &e)
  {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return 2;
  }
  catch (const std::invalid_argument &e)
  {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return 2;
  }

  const std::string text = dump(report.to_json());
  if (spec.out.empty())
  {
    std::cout << text;
  }
  else
  {
    std::ofstream out(spec.out);
    if (!out)
    {
      std::cerr << "cannot write " << spec.out << "\n";
      return 2;
    }
    out << text;
  }
  for (const auto &g : report.gates)
  {
    std::cerr << (g.passed ? "PASS " : "FAIL ") << g.id << ": " << g.description << " (measured "
              << g.measured << ", threshold " << g.threshold << ")\n";
  }
  return report.all_passed() ? 0 : 1;
}
