// SPDX-License-Identifier: Apache-2.0

#include "gmg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmg/rng.hpp"

namespace gmg
{

std::string_view to_string(PrecisionTag tag)
{
  switch (tag)
  {
    case PrecisionTag::FP64:
      return "fp64";
    case PrecisionTag::FP32:
      return "fp32";
    case PrecisionTag::BF16EMU:
      return "bf16";
  }
  return "?";
}

PrecisionTag parse_precision_tag(std::string_view name)
{
  if (name == "fp64")
  {
    return PrecisionTag::FP64;
  }
  if (name == "fp32")
  {
    return PrecisionTag::FP32;
  }
  if (name == "bf16")
  {
    return PrecisionTag::BF16EMU;
  }
  throw std::invalid_argument("unknown precision: " + std::string(name));
}

StructuredGrid::StructuredGrid(Index nx, Index ny, Index nz, std::vector<bool> dirichlet_mask)
  : nx_(nx), ny_(ny), nz_(nz), dirichlet_mask_(std::move(dirichlet_mask))
{
  if (nx < 1 || ny < 1 || nz < 1)
  {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (static_cast<Index>(dirichlet_mask_.size()) != num_dofs())
  {
    throw std::invalid_argument("Dirichlet mask length does not match DOF count");
  }
  free_map_.assign(num_dofs(), -1);
  for (Index d = 0; d < num_dofs(); d++)
  {
    if (!dirichlet_mask_[d])
    {
      free_map_[d] = static_cast<Index>(free_dofs_.size());
      free_dofs_.push_back(d);
    }
  }
  load_ = Vector::Zero(num_dofs());
}

std::array<Index, 8> StructuredGrid::element_nodes(Index e) const
{
  const Index i = e % nx_;
  const Index j = (e / nx_) % ny_;
  const Index k = e / (nx_ * ny_);
  std::array<Index, 8> nodes;
  for (int c = 0; c < 2; c++)
  {
    for (int b = 0; b < 2; b++)
    {
      for (int a = 0; a < 2; a++)
      {
        nodes[a + 2 * b + 4 * c] = node(i + a, j + b, k + c);
      }
    }
  }
  return nodes;
}

void StructuredGrid::set_load(const Vector &load)
{
  if (load.size() != num_dofs())
  {
    throw std::invalid_argument("load length does not match DOF count");
  }
  for (Index d = 0; d < num_dofs(); d++)
  {
    if (dirichlet_mask_[d] && load[d] != 0.0)
    {
      throw std::invalid_argument("load on a fixed DOF");
    }
  }
  load_ = load;
}

Vector StructuredGrid::free_load() const
{
  Vector f(num_free());
  for (Index i = 0; i < num_free(); i++)
  {
    f[i] = load_[free_dofs_[i]];
  }
  return f;
}

StructuredGrid build_cantilever(Index nx, Index ny, Index nz)
{
  if (nx < 1 || ny < 1 || nz < 1)
  {
    throw std::invalid_argument("cantilever dimensions must be positive");
  }
  const Index n_nodes = (nx + 1) * (ny + 1) * (nz + 1);
  std::vector<bool> mask(3 * n_nodes, false);
  for (Index k = 0; k <= nz; k++)
  {
    for (Index j = 0; j <= ny; j++)
    {
      const Index n = (nx + 1) * (j + (ny + 1) * k);
      mask[3 * n] = mask[3 * n + 1] = mask[3 * n + 2] = true;
    }
  }
  StructuredGrid grid(nx, ny, nz, std::move(mask));

  Vector load = Vector::Zero(grid.num_dofs());
  const double per_node = 1.0 / static_cast<double>(nz + 1);
  for (Index k = 0; k <= nz; k++)
  {
    load[3 * grid.node(nx, 0, k) + 1] = -per_node;
  }
  grid.set_load(load);
  return grid;
}

double ModulusField::max() const
{
  return E.empty() ? 0.0 : *std::max_element(E.begin(), E.end());
}

ModulusField simp_modulus(const DensityField &rho, double p, double Emin, double E0)
{
  if (!(p > 0.0))
  {
    throw std::invalid_argument("SIMP penalization must be positive");
  }
  if (!(Emin > 0.0) || !(Emin < E0))
  {
    throw std::invalid_argument("SIMP moduli must satisfy 0 < Emin < E0");
  }
  ModulusField out;
  out.params = {E0, Emin, p};
  out.E.resize(rho.rho.size());
  for (std::size_t e = 0; e < rho.rho.size(); e++)
  {
    const double r = rho.rho[e];
    if (!(r >= 0.0 && r <= 1.0))
    {
      throw std::invalid_argument("density outside [0, 1]");
    }
    out.E[e] = Emin + (E0 - Emin) * std::pow(r, p);
  }
  return out;
}

std::string_view to_string(StateKind kind)
{
  switch (kind)
  {
    case StateKind::Uniform:
      return "uniform";
    case StateKind::Binary:
      return "binary";
    case StateKind::Checkerboard:
      return "checkerboard";
    case StateKind::Layered:
      return "layered";
    case StateKind::RandomFloor:
      return "random_floor";
    case StateKind::MixedNearVoid:
      return "mixed_near_void";
  }
  return "?";
}

StateKind parse_state_kind(std::string_view name)
{
  for (auto kind : {StateKind::Uniform, StateKind::Binary, StateKind::Checkerboard,
                    StateKind::Layered, StateKind::RandomFloor, StateKind::MixedNearVoid})
  {
    if (to_string(kind) == name)
    {
      return kind;
    }
  }
  throw std::invalid_argument("unknown state kind: " + std::string(name));
}

namespace
{

bool uses_volume_fraction(StateKind kind)
{
  return kind == StateKind::Uniform || kind == StateKind::Binary ||
         kind == StateKind::MixedNearVoid;
}

bool uses_floor(StateKind kind)
{
  return kind != StateKind::Uniform;
}

std::string describe(StateKind kind, const StateParams &params, std::uint64_t seed)
{
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind);
  if (uses_volume_fraction(kind))
  {
    os << " vf=" << params.vf;
  }
  if (uses_floor(kind))
  {
    os << " floor=" << params.floor;
  }
  if (kind == StateKind::Binary || kind == StateKind::RandomFloor ||
      kind == StateKind::MixedNearVoid)
  {
    os << " seed=" << seed;
  }
  return os.str();
}

}  // namespace

DensityField make_state(const StructuredGrid &grid, StateKind kind, const StateParams &params,
                        std::uint64_t seed)
{
  if (uses_volume_fraction(kind) && !(params.vf > 0.0 && params.vf < 1.0))
  {
    throw std::invalid_argument("volume fraction must lie in (0, 1)");
  }
  if (uses_floor(kind) && !(params.floor >= 0.0 && params.floor <= 1.0))
  {
    throw std::invalid_argument("density floor must lie in [0, 1]");
  }

  const Index nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
  DensityField field;
  field.label = describe(kind, params, seed);
  field.rho.assign(grid.num_elements(), params.floor);
  SplitMix64 rng(seed);

  switch (kind)
  {
    case StateKind::Uniform:
      std::fill(field.rho.begin(), field.rho.end(), params.vf);
      break;
    case StateKind::Binary:
      for (auto &r : field.rho)
      {
        r = rng.uniform() < params.vf ? 1.0 : params.floor;
      }
      break;
    case StateKind::Checkerboard:
      for (Index k = 0; k < nz; k++)
      {
        for (Index j = 0; j < ny; j++)
        {
          for (Index i = 0; i < nx; i++)
          {
            field.rho[grid.element(i, j, k)] = (i + j + k) % 2 == 0 ? 1.0 : params.floor;
          }
        }
      }
      break;
    case StateKind::Layered:
      for (Index k = 0; k < nz; k++)
      {
        for (Index j = 0; j < ny; j++)
        {
          // Element centre (j + 1/2) below the mid-plane.
          const bool solid = 2 * j + 1 < ny;
          for (Index i = 0; i < nx; i++)
          {
            field.rho[grid.element(i, j, k)] = solid ? 1.0 : params.floor;
          }
        }
      }
      break;
    case StateKind::RandomFloor:
      for (auto &r : field.rho)
      {
        r = params.floor + (1.0 - params.floor) * rng.uniform();
      }
      break;
    case StateKind::MixedNearVoid:
    {
      for (auto &r : field.rho)
      {
        r = rng.uniform() < params.vf ? 1.0 : params.floor;
      }
      SplitMix64 demote = rng.split();
      for (auto &r : field.rho)
      {
        if (r == 1.0 && demote.uniform() < kNearVoidDemotion)
        {
          r = params.floor;
        }
      }
      break;
    }
  }
  return field;
}

}  // namespace gmg
