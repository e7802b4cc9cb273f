// SPDX-License-Identifier: Apache-2.0

#include "gmg/transfer.hpp"

#include <utility>

namespace gmg
{

namespace
{

// Coarse parents of a fine index along one axis with their 1D weights.
int parents_1d(Index f, Index (&idx)[2], double (&w)[2])
{
  if (f % 2 == 0)
  {
    idx[0] = f / 2;
    w[0] = 1.0;
    return 1;
  }
  idx[0] = f / 2;
  idx[1] = f / 2 + 1;
  w[0] = w[1] = 0.5;
  return 2;
}

std::array<ElementMatrix, 8> make_child_prolongations()
{
  std::array<ElementMatrix, 8> out;
  for (int child = 0; child < 8; child++)
  {
    const int d[3] = {child & 1, (child >> 1) & 1, (child >> 2) & 1};
    ElementMatrix &P = out[child];
    P.setZero();
    for (int nf = 0; nf < 8; nf++)
    {
      // Fine node position inside the coarse element, in half-widths (0, 1, 2).
      const int pos[3] = {d[0] + (nf & 1), d[1] + ((nf >> 1) & 1), d[2] + ((nf >> 2) & 1)};
      for (int nc = 0; nc < 8; nc++)
      {
        const int corner[3] = {nc & 1, (nc >> 1) & 1, (nc >> 2) & 1};
        double w = 1.0;
        for (int a = 0; a < 3; a++)
        {
          const double t = 0.5 * pos[a];
          w *= corner[a] ? t : 1.0 - t;
        }
        if (w != 0.0)
        {
          for (int axis = 0; axis < 3; axis++)
          {
            P(3 * nf + axis, 3 * nc + axis) = w;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

const std::array<ElementMatrix, 8> &child_prolongations()
{
  static const std::array<ElementMatrix, 8> patterns = make_child_prolongations();
  return patterns;
}

TransferPair build_transfer(const StructuredGrid &fine)
{
  if (fine.nx() % 2 != 0 || fine.ny() % 2 != 0 || fine.nz() % 2 != 0)
  {
    throw CoarseningUnavailable("grid " + std::to_string(fine.nx()) + "x" +
                                std::to_string(fine.ny()) + "x" + std::to_string(fine.nz()) +
                                " has an odd dimension");
  }
  const Index cx = fine.nx() / 2, cy = fine.ny() / 2, cz = fine.nz() / 2;
  const Index n_coarse_nodes = (cx + 1) * (cy + 1) * (cz + 1);
  std::vector<bool> mask(3 * n_coarse_nodes);
  for (Index k = 0; k <= cz; k++)
  {
    for (Index j = 0; j <= cy; j++)
    {
      for (Index i = 0; i <= cx; i++)
      {
        const Index nc = i + (cx + 1) * (j + (cy + 1) * k);
        const Index nf = fine.node(2 * i, 2 * j, 2 * k);
        for (int axis = 0; axis < 3; axis++)
        {
          mask[3 * nc + axis] = fine.is_fixed(3 * nf + axis);
        }
      }
    }
  }
  StructuredGrid coarse(cx, cy, cz, std::move(mask));

  std::vector<Index> ptr{0}, col;
  std::vector<double> val;
  ptr.reserve(fine.num_free() + 1);
  std::vector<std::pair<Index, double>> row;
  for (Index k = 0; k <= fine.nz(); k++)
  {
    for (Index j = 0; j <= fine.ny(); j++)
    {
      for (Index i = 0; i <= fine.nx(); i++)
      {
        Index pi[2], pj[2], pk[2];
        double wi[2], wj[2], wk[2];
        const int ni = parents_1d(i, pi, wi);
        const int nj = parents_1d(j, pj, wj);
        const int nk = parents_1d(k, pk, wk);
        const Index nf = fine.node(i, j, k);
        for (int axis = 0; axis < 3; axis++)
        {
          if (fine.is_fixed(3 * nf + axis))
          {
            continue;
          }
          row.clear();
          for (int c = 0; c < nk; c++)
          {
            for (int b = 0; b < nj; b++)
            {
              for (int a = 0; a < ni; a++)
              {
                const Index dof = 3 * coarse.node(pi[a], pj[b], pk[c]) + axis;
                const Index cfree = coarse.free_index(dof);
                if (cfree >= 0)
                {
                  row.emplace_back(cfree, wi[a] * wj[b] * wk[c]);
                }
              }
            }
          }
          std::sort(row.begin(), row.end());
          for (const auto &[c, w] : row)
          {
            col.push_back(c);
            val.push_back(w);
          }
          ptr.push_back(static_cast<Index>(col.size()));
        }
      }
    }
  }
  TransferPair out{CsrMatrix<double>(fine.num_free(), coarse.num_free(), std::move(ptr),
                                     std::move(col), std::move(val)),
                   std::move(coarse)};
  return out;
}

namespace
{

// Structural pattern of the coarse operator: every free DOF couples to the free DOFs of
// the 27 neighbouring nodes. Rows come out sorted because neighbours are visited in
// ascending node order.
CsrMatrix<double> nodal_pattern(const StructuredGrid &g)
{
  std::vector<Index> ptr{0}, col;
  for (Index row = 0; row < g.num_free(); row++)
  {
    const Index dof = g.free_dofs()[row];
    const Index node = dof / 3;
    const Index i = node % (g.nx() + 1);
    const Index j = (node / (g.nx() + 1)) % (g.ny() + 1);
    const Index k = node / ((g.nx() + 1) * (g.ny() + 1));
    for (Index kk = std::max<Index>(k - 1, 0); kk <= std::min(k + 1, g.nz()); kk++)
    {
      for (Index jj = std::max<Index>(j - 1, 0); jj <= std::min(j + 1, g.ny()); jj++)
      {
        for (Index ii = std::max<Index>(i - 1, 0); ii <= std::min(i + 1, g.nx()); ii++)
        {
          const Index nb = g.node(ii, jj, kk);
          for (int axis = 0; axis < 3; axis++)
          {
            const Index c = g.free_index(3 * nb + axis);
            if (c >= 0)
            {
              col.push_back(c);
            }
          }
        }
      }
    }
    ptr.push_back(static_cast<Index>(col.size()));
  }
  std::vector<double> val(col.size(), 0.0);
  return CsrMatrix<double>(g.num_free(), g.num_free(), std::move(ptr), std::move(col),
                           std::move(val));
}

}  // namespace

CsrMatrix<double> assemble_level1(const FineOperator &op, const TransferPair &transfer)
{
  const StructuredGrid &fine = op.grid();
  const StructuredGrid &coarse = transfer.coarse;
  if (coarse.nx() * 2 != fine.nx() || coarse.ny() * 2 != fine.ny() ||
      coarse.nz() * 2 != fine.nz() || transfer.fine_size() != fine.num_free())
  {
    throw std::invalid_argument("transfer does not belong to this fine operator");
  }

  const ElementMatrix &Ke = op.element_stiffness();
  const auto &patterns = child_prolongations();
  std::array<ElementMatrix, 8> Kc;
  for (int c = 0; c < 8; c++)
  {
    Kc[c].noalias() = patterns[c].transpose() * Ke * patterns[c];
  }

  CsrMatrix<double> K1 = nodal_pattern(coarse);
  auto &values = K1.values();
  const auto &fine_dofs = op.element_dofs();
  const auto &E = op.modulus().E;

  ElementMatrix Kce, Pm;
  for (Index ce = 0; ce < coarse.num_elements(); ce++)
  {
    const Index ci = ce % coarse.nx();
    const Index cj = (ce / coarse.nx()) % coarse.ny();
    const Index ck = ce / (coarse.nx() * coarse.ny());
    Kce.setZero();
    for (int child = 0; child < 8; child++)
    {
      const Index fe =
        fine.element(2 * ci + (child & 1), 2 * cj + ((child >> 1) & 1), 2 * ck + ((child >> 2) & 1));
      const ElementDofs &dofs = fine_dofs[fe];
      const bool all_free = std::all_of(dofs.begin(), dofs.end(), [](auto d) { return d >= 0; });
      if (all_free)
      {
        Kce.noalias() += E[fe] * Kc[child];
      }
      else
      {
        // Fixed fine DOFs carry no prolongated value.
        Pm = patterns[child];
        for (int l = 0; l < 24; l++)
        {
          if (dofs[l] < 0)
          {
            Pm.row(l).setZero();
          }
        }
        Kce.noalias() += E[fe] * (Pm.transpose() * Ke * Pm);
      }
    }

    const auto nodes = coarse.element_nodes(ce);
    Index cdofs[24];
    for (int n = 0; n < 8; n++)
    {
      for (int axis = 0; axis < 3; axis++)
      {
        cdofs[3 * n + axis] = coarse.free_index(3 * nodes[n] + axis);
      }
    }
    for (int a = 0; a < 24; a++)
    {
      if (cdofs[a] < 0)
      {
        continue;
      }
      for (int b = 0; b < 24; b++)
      {
        if (cdofs[b] >= 0)
        {
          values[K1.find(cdofs[a], cdofs[b])] += Kce(a, b);
        }
      }
    }
  }
  K1.compact();
  return K1;
}

}  // namespace gmg
