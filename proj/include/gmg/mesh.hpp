// SPDX-License-Identifier: Apache-2.0

#ifndef GMG_MESH_HPP
#define GMG_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gmg/common.hpp"

namespace gmg
{

//
// Structured hexahedral grid of nx * ny * nz unit elements.
//
// Node (i, j, k) has index i + (nx + 1) * (j + (ny + 1) * k), i.e. i runs fastest, and
// DOF = 3 * node + axis. Element (i, j, k) is numbered the same way over (nx, ny, nz).
// The local node order of an element is (a, b, c) -> a + 2 b + 4 c for offsets in {0, 1}.
// Transfer operators and the element stiffness depend on this ordering.
//
class StructuredGrid
{
public:
  StructuredGrid() = default;

  // Grid with the given Dirichlet mask (true = fixed) and a zero load.
  StructuredGrid(Index nx, Index ny, Index nz, std::vector<bool> dirichlet_mask);

  Index nx() const { return nx_; }
  Index ny() const { return ny_; }
  Index nz() const { return nz_; }
  Index num_elements() const { return nx_ * ny_ * nz_; }
  Index num_nodes() const { return (nx_ + 1) * (ny_ + 1) * (nz_ + 1); }
  Index num_dofs() const { return 3 * num_nodes(); }
  Index num_free() const { return static_cast<Index>(free_dofs_.size()); }

  Index node(Index i, Index j, Index k) const { return i + (nx_ + 1) * (j + (ny_ + 1) * k); }
  Index element(Index i, Index j, Index k) const { return i + nx_ * (j + ny_ * k); }

  // The 8 node indices of element e in local order.
  std::array<Index, 8> element_nodes(Index e) const;

  const std::vector<bool> &dirichlet_mask() const { return dirichlet_mask_; }
  bool is_fixed(Index dof) const { return dirichlet_mask_[dof]; }

  // Dense free index of a DOF, or -1 when fixed.
  Index free_index(Index dof) const { return free_map_[dof]; }
  const std::vector<Index> &free_map() const { return free_map_; }
  const std::vector<Index> &free_dofs() const { return free_dofs_; }

  // Full-length load (zero on fixed DOFs).
  const Vector &load() const { return load_; }
  void set_load(const Vector &load);

  // Load restricted to the free DOFs.
  Vector free_load() const;

private:
  Index nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<bool> dirichlet_mask_;
  std::vector<Index> free_map_;
  std::vector<Index> free_dofs_;
  Vector load_;
};

// All DOFs on the x = 0 face fixed; unit total -y load spread evenly over the nodes of the
// free-end edge x = nx, y = 0.
StructuredGrid build_cantilever(Index nx, Index ny, Index nz);

struct DensityField
{
  std::vector<double> rho;
  std::string label;
};

struct SimpParams
{
  double E0 = 1.0;
  double Emin = 1e-9;
  double p = 3.0;
};

struct ModulusField
{
  std::vector<double> E;
  SimpParams params;

  double max() const;
};

// E_e = Emin + (E0 - Emin) * rho_e^p.
ModulusField simp_modulus(const DensityField &rho, double p, double Emin, double E0);

enum class StateKind
{
  Uniform,
  Binary,
  Checkerboard,
  Layered,
  RandomFloor,
  MixedNearVoid
};

std::string_view to_string(StateKind kind);
StateKind parse_state_kind(std::string_view name);

struct StateParams
{
  double vf = 0.5;
  double floor = 1e-2;
};

// Fraction of solid voxels demoted to the floor in a mixed near-void field.
inline constexpr double kNearVoidDemotion = 0.1;

DensityField make_state(const StructuredGrid &grid, StateKind kind, const StateParams &params,
                        std::uint64_t seed);

}  // namespace gmg

#endif  // GMG_MESH_HPP
