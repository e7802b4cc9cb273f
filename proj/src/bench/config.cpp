// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "gmg/bench.hpp"

namespace gmg::bench
{

namespace
{

std::string trim(std::string s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
  {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string &s, char sep)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep))
  {
    out.push_back(trim(item));
  }
  if (out.empty())
  {
    out.push_back("");
  }
  return out;
}

template <typename T>
T parse_number(const std::string &key, const std::string &text)
{
  T value{};
  const char *end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
  {
    throw InvalidSpec("bad value for '" + key + "': '" + text + "'");
  }
  return value;
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string &key, const std::string &text, Fn one)
{
  std::vector<T> out;
  for (const auto &item : split(text, ','))
  {
    out.push_back(one(key, item));
  }
  return out;
}

template <typename Fn>
auto wrap(Fn fn)
{
  return [fn](const std::string &key, const std::string &text) {
    try
    {
      return fn(text);
    }
    catch (const std::invalid_argument &e)
    {
      throw InvalidSpec("bad value for '" + key + "': " + e.what());
    }
  };
}

Grid parse_grid(const std::string &key, const std::string &text)
{
  const auto parts = split(text, ',');
  if (parts.size() != 3)
  {
    throw InvalidSpec("'" + key + "' needs NX,NY,NZ, got '" + text + "'");
  }
  Grid g;
  for (int a = 0; a < 3; a++)
  {
    g[a] = parse_number<Index>(key, parts[a]);
  }
  return g;
}

using Setter = std::function<void(ExperimentSpec &, const std::string &, const std::string &)>;

const std::vector<std::pair<std::string, Setter>> &setters()
{
  static const std::vector<std::pair<std::string, Setter>> table = {
    {"grid",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.grids.clear();
       for (const auto &g : split(v, ';'))
       {
         s.grids.push_back(parse_grid(k, g));
       }
     }},
    {"state",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.state = wrap([](const std::string &t) { return parse_state_kind(t); })(k, v);
     }},
    {"vf",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.vf = parse_list<double>(k, v, parse_number<double>);
     }},
    {"p",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.p = parse_list<double>(k, v, parse_number<double>);
     }},
    {"floor",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.floor = parse_number<double>(k, v);
     }},
    {"seed",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.seed = parse_number<std::uint64_t>(k, v);
     }},
    {"method",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       if (v == "auto")
       {
         s.method.reset();
       }
       else
       {
         s.method = wrap([](const std::string &t) { return parse_krylov_method(t); })(k, v);
       }
     }},
    {"preconditioner",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       if (v == "gmg")
       {
         s.preconditioner = Preconditioner::Gmg;
       }
       else if (v == "jacobi")
       {
         s.preconditioner = Preconditioner::Jacobi;
       }
       else
       {
         throw InvalidSpec("bad value for '" + k + "': '" + v + "'");
       }
     }},
    {"precision",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.precision = parse_list<PrecisionPolicy>(
         k, v, wrap([](const std::string &t) { return parse_precision_policy(t); }));
     }},
    {"levels",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.levels = parse_list<int>(k, v, parse_number<int>);
     }},
    {"smoother",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.smoother = parse_list<SmootherKind>(
         k, v, wrap([](const std::string &t) { return parse_smoother_kind(t); }));
     }},
    {"degree",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.degree = parse_list<int>(k, v, parse_number<int>);
     }},
    {"alpha",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.alpha = parse_number<double>(k, v);
     }},
    {"omega",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.omega = parse_number<double>(k, v);
     }},
    {"restart",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.restart = parse_list<int>(k, v, parse_number<int>);
     }},
    {"tol",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.tol = parse_number<double>(k, v);
     }},
    {"maxiter",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.maxiter = parse_number<int>(k, v);
     }},
    {"trials",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.trials = parse_number<int>(k, v);
     }},
    {"warmups",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.warmups = parse_number<int>(k, v);
     }},
    {"lanczos_steps",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.lanczos_steps = parse_number<int>(k, v);
     }},
    {"lanczos_seed",
     [](ExperimentSpec &s, const std::string &k, const std::string &v) {
       s.lanczos_seed = parse_number<std::uint64_t>(k, v);
     }},
    {"out", [](ExperimentSpec &s, const std::string &, const std::string &v) { s.out = v; }},
  };
  return table;
}

}  // namespace

const std::vector<std::string> &spec_keys()
{
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto &[name, fn] : setters())
    {
      k.push_back(name);
    }
    return k;
  }();
  return keys;
}

void apply_key(ExperimentSpec &spec, const std::string &key, const std::string &value)
{
  for (const auto &[name, fn] : setters())
  {
    if (name == key)
    {
      fn(spec, key, trim(value));
      return;
    }
  }
  throw InvalidSpec("unknown key '" + key + "'");
}

std::map<std::string, std::string> parse_config(const std::string &text)
{
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line))
  {
    lineno++;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw InvalidSpec("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (std::find(spec_keys().begin(), spec_keys().end(), key) == spec_keys().end())
    {
      throw InvalidSpec("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InvalidSpec("cannot read config file '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void ExperimentSpec::validate() const
{
  static const std::vector<std::string> commands{"validate", "solve", "sweep", "probe", "robustness"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end())
  {
    throw InvalidSpec("unknown command '" + command + "'");
  }
  auto require = [](bool ok, const std::string &what) {
    if (!ok)
    {
      throw InvalidSpec(what);
    }
  };
  require(!grids.empty() && !vf.empty() && !p.empty() && !precision.empty() && !levels.empty() &&
            !smoother.empty() && !degree.empty() && !restart.empty(),
          "every axis needs at least one value");
  for (const auto &g : grids)
  {
    require(g[0] >= 1 && g[1] >= 1 && g[2] >= 1, "grid dimensions must be positive");
  }
  for (double v : vf)
  {
    require(v >= 0.0 && v <= 1.0, "vf must lie in [0, 1]");
  }
  for (double x : p)
  {
    require(x >= 1.0, "penalization p must be at least 1");
  }
  require(floor > 0.0 && floor <= 1.0, "floor must lie in (0, 1]");
  for (int l : levels)
  {
    require(l >= 1, "levels must be at least 1");
  }
  for (int d : degree)
  {
    require(d >= 1, "degree must be at least 1");
  }
  for (int r : restart)
  {
    require(r >= 1, "restart must be at least 1");
  }
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require(omega > 0.0 && omega <= kJacobiDampingCap, "omega must lie in (0, 0.5]");
  require(tol > 0.0 && tol < 1.0, "tol must lie in (0, 1)");
  require(maxiter >= 1, "maxiter must be at least 1");
  require(trials >= 1, "trials must be at least 1");
  require(warmups >= 0, "warmups must be non-negative");
  require(lanczos_steps >= 2, "lanczos_steps must be at least 2");
  if (command != "sweep")
  {
    require(grids.size() == 1 && vf.size() == 1 && p.size() == 1 && precision.size() == 1 &&
              levels.size() == 1 && smoother.size() == 1 && degree.size() == 1 &&
              restart.size() == 1,
            "only sweep accepts lists of values");
  }
}

KrylovMethod effective_method(const ExperimentSpec &spec, PrecisionPolicy precision)
{
  if (spec.method)
  {
    return *spec.method;
  }
  return precision == PrecisionPolicy::BF16 ? KrylovMethod::Fgmres : KrylovMethod::Pcg;
}

std::vector<Cell> expand_cells(const ExperimentSpec &spec)
{
  std::vector<Cell> cells;
  for (const auto &g : spec.grids)
    for (double vf : spec.vf)
      for (double p : spec.p)
        for (auto prec : spec.precision)
          for (int lv : spec.levels)
            for (auto sm : spec.smoother)
              for (int deg : spec.degree)
                for (int rs : spec.restart)
                  cells.push_back(Cell{g, vf, p, prec, lv, sm, deg, rs});
  return cells;
}

}  // namespace gmg::bench
