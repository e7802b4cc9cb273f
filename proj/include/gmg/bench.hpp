// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_BENCH_HPP
#define GMG_BENCH_HPP

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmg/diagnostics.hpp"
#include "gmg/krylov.hpp"
#include "gmg/mesh.hpp"
#include "gmg/multigrid.hpp"
#include "gmg/smoothers.hpp"

namespace gmg::bench
{

using Json = nlohmann::ordered_json;

inline constexpr const char *kVersion = "0.1.0";

// Any malformed key, value or combination. Maps to exit code 2.
class InvalidSpec : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

using Grid = std::array<Index, 3>;

enum class Preconditioner
{
  Gmg,
  Jacobi
};

//
// Everything a run needs. Axes that a sweep may vary are lists; every other command
// requires them to hold exactly one value. Defaults: depth 4,
// fine degree 2, restart 32, 2 warm-ups and 10 timed trials.
//
struct ExperimentSpec
{
  std::string command = "solve";

  std::vector<Grid> grids{{16, 8, 8}};
  StateKind state = StateKind::Uniform;
  std::vector<double> vf{0.5};
  std::vector<double> p{3.0};
  double floor = 1e-2;
  std::uint64_t seed = 0;

  std::optional<KrylovMethod> method;  // empty: PCG for fp64/fp32, FGMRES for bf16
  Preconditioner preconditioner = Preconditioner::Gmg;
  std::vector<PrecisionPolicy> precision{PrecisionPolicy::FP32};
  std::vector<int> levels{4};
  std::vector<SmootherKind> smoother{SmootherKind::Chebyshev};
  std::vector<int> degree{2};
  double alpha = kDefaultLowerFraction;
  double omega = kJacobiDampingCap;
  std::vector<int> restart{32};
  double tol = 1e-6;
  int maxiter = 200;

  int trials = 10;
  int warmups = 2;
  int lanczos_steps = kDefaultLanczosSteps;
  std::uint64_t lanczos_seed = 0;

  std::string out;

  // Throws InvalidSpec.
  void validate() const;
};

// All recognised keys, shared by config files and command-line flags.
const std::vector<std::string> &spec_keys();

// Sets one key from its textual value. Throws InvalidSpec on unknown keys or bad values.
void apply_key(ExperimentSpec &spec, const std::string &key, const std::string &value);

// key=value lines; '#' starts a comment; blank lines are ignored.
std::map<std::string, std::string> parse_config(const std::string &text);
std::map<std::string, std::string> read_config_file(const std::string &path);

Json to_json(const ExperimentSpec &spec);

KrylovMethod effective_method(const ExperimentSpec &spec, PrecisionPolicy precision);

// One cell of the parameter grid, fully resolved.
struct Cell
{
  Grid grid;
  double vf;
  double p;
  PrecisionPolicy precision;
  int levels;
  SmootherKind smoother;
  int degree;
  int restart;
};

std::vector<Cell> expand_cells(const ExperimentSpec &spec);
Json to_json(const Cell &cell);

struct Gate
{
  std::string id;
  std::string description;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
};

Json to_json(const Gate &gate);

struct RunReport
{
  Json spec;
  Json trials = Json::array();
  Json aggregates = Json::object();
  std::vector<Gate> gates;

  bool all_passed() const;
  Json to_json() const;
};

// Population mean and standard deviation, summed in index order.
std::pair<double, double> mean_stddev(const std::vector<double> &values);

// Report without environment and without any key ending in "_seconds".
Json numeric_payload(const Json &report);

// Run-time environment stamp: version, worker count, compiler, Eigen version.
Json environment();

// Compliance f^T u on the free DOFs.
double compliance(const Vector &f, const Vector &u);

RunReport cmd_validate(const ExperimentSpec &spec);
RunReport cmd_solve(const ExperimentSpec &spec);
RunReport cmd_sweep(const ExperimentSpec &spec);
RunReport cmd_probe(const ExperimentSpec &spec);
RunReport cmd_robustness(const ExperimentSpec &spec);

// Dispatch on spec.command.
RunReport run(const ExperimentSpec &spec);

}  // namespace gmg::bench

#endif  // GMG_BENCH_HPP
