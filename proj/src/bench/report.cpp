// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Core>
#include <cmath>

#include "gmg/bench.hpp"

namespace gmg::bench
{

namespace
{

Json grid_json(const Grid &g)
{
  return Json::array({g[0], g[1], g[2]});
}

template <typename T, typename Fn>
Json list_json(const std::vector<T> &values, Fn fn)
{
  Json out = Json::array();
  for (const auto &v : values)
  {
    out.push_back(fn(v));
  }
  return out;
}

std::string name(PrecisionPolicy p)
{
  return std::string(to_string(p));
}

std::string name(SmootherKind k)
{
  return std::string(to_string(k));
}

}  // namespace

Json to_json(const ExperimentSpec &s)
{
  Json j;
  j["command"] = s.command;
  j["grid"] = list_json(s.grids, grid_json);
  j["state"] = std::string(to_string(s.state));
  j["vf"] = s.vf;
  j["p"] = s.p;
  j["floor"] = s.floor;
  j["seed"] = s.seed;
  j["method"] = s.method ? std::string(to_string(*s.method)) : "auto";
  j["preconditioner"] = s.preconditioner == Preconditioner::Gmg ? "gmg" : "jacobi";
  j["precision"] = list_json(s.precision, [](PrecisionPolicy p) { return name(p); });
  j["levels"] = s.levels;
  j["smoother"] = list_json(s.smoother, [](SmootherKind k) { return name(k); });
  j["degree"] = s.degree;
  j["alpha"] = s.alpha;
  j["omega"] = s.omega;
  j["restart"] = s.restart;
  j["tol"] = s.tol;
  j["maxiter"] = s.maxiter;
  j["trials"] = s.trials;
  j["warmups"] = s.warmups;
  j["lanczos_steps"] = s.lanczos_steps;
  j["lanczos_seed"] = s.lanczos_seed;
  return j;
}

Json to_json(const Cell &c)
{
  Json j;
  j["grid"] = grid_json(c.grid);
  j["vf"] = c.vf;
  j["p"] = c.p;
  j["precision"] = name(c.precision);
  j["levels"] = c.levels;
  j["smoother"] = name(c.smoother);
  j["degree"] = c.degree;
  j["restart"] = c.restart;
  return j;
}

Json to_json(const Gate &g)
{
  Json j;
  j["id"] = g.id;
  j["description"] = g.description;
  j["passed"] = g.passed;
  j["measured"] = g.measured;
  j["threshold"] = g.threshold;
  return j;
}

bool RunReport::all_passed() const
{
  for (const auto &g : gates)
  {
    if (!g.passed)
    {
      return false;
    }
  }
  return true;
}

Json RunReport::to_json() const
{
  Json j;
  j["spec"] = spec;
  j["trials"] = trials;
  j["aggregates"] = aggregates;
  j["gates"] = Json::array();
  for (const auto &g : gates)
  {
    j["gates"].push_back(bench::to_json(g));
  }
  j["environment"] = environment();
  return j;
}

std::pair<double, double> mean_stddev(const std::vector<double> &values)
{
  if (values.empty())
  {
    return {0.0, 0.0};
  }
  double sum = 0.0;
  for (double v : values)
  {
    sum += v;
  }
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values)
  {
    sq += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

Json numeric_payload(const Json &report)
{
  if (report.is_object())
  {
    Json out = Json::object();
    for (const auto &[key, value] : report.items())
    {
      const bool timing = key.size() >= 8 && key.compare(key.size() - 8, 8, "_seconds") == 0;
      if (timing || key == "environment")
      {
        continue;
      }
      out[key] = numeric_payload(value);
    }
    return out;
  }
  if (report.is_array())
  {
    Json out = Json::array();
    for (const auto &v : report)
    {
      out.push_back(numeric_payload(v));
    }
    return out;
  }
  return report;
}

Json environment()
{
  Json j;
  j["version"] = kVersion;
  j["workers"] = 1;
#if defined(__clang__)
  j["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  j["compiler"] = std::string("gcc ") + __VERSION__;
#else
  j["compiler"] = "unknown";
#endif
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  return j;
}

double compliance(const Vector &f, const Vector &u)
{
  return f.dot(u);
}

}  // namespace gmg::bench
