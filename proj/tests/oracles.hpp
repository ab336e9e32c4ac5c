// Test-only oracles, independent of the library's assembly and solver paths.
#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ellspec/linalg.hpp"
#include "ellspec/mesh.hpp"

namespace ellspec::testing {

// Dense stiffness matrix for constant K by exact polynomial integration of
// the Q1 gradient products, cell by cell:
//   integral over a cell of dN_a/dx_k dN_b/dx_k
//     = (prod_j h_j) / h_k^2 * g(a_k,b_k) * prod_{j != k} m(a_j,b_j)
// with the 1D exact values g(p,q) = p == q ? 1 : -1 (gradient factor) and
// m(p,q) = p == q ? 1/3 : 1/6 (mass factor). Indexing is coded from scratch.
inline linalg::DenseMatrix exact_constant_stiffness(
    const mesh::StructuredGrid& grid, const std::array<double, 3>& kappa) {
  const int d = grid.dim();
  const int local_nodes = 1 << d;

  // local matrix, exact integration
  std::vector<double> local(static_cast<std::size_t>(local_nodes) * local_nodes, 0.0);
  double vol = 1.0;
  for (int k = 0; k < d; ++k) vol *= grid.spacing[k];
  for (int a = 0; a < local_nodes; ++a) {
    for (int b = 0; b < local_nodes; ++b) {
      double entry = 0.0;
      for (int k = 0; k < d; ++k) {
        double term = ((a >> k & 1) == (b >> k & 1)) ? 1.0 : -1.0;
        for (int j = 0; j < d; ++j) {
          if (j == k) continue;
          term *= ((a >> j & 1) == (b >> j & 1)) ? 1.0 / 3.0 : 1.0 / 6.0;
        }
        entry += kappa[static_cast<std::size_t>(k)] * term * vol /
                 (grid.spacing[k] * grid.spacing[k]);
      }
      local[static_cast<std::size_t>(a) * local_nodes + b] = entry;
    }
  }

  // independent interior numbering: axis-1-fastest lexicographic
  std::array<int, 3> m{1, 1, 1};
  for (int k = 0; k < d; ++k) m[k] = grid.cells[k] - 1;
  auto dof_of = [&](const std::array<int, 3>& j) {
    return (j[0] - 1) + m[0] * ((j[1] - 1) + m[1] * (j[2] - 1));
  };

  const std::size_t n = grid.interior_dofs;
  linalg::DenseMatrix A(n, n);
  std::array<int, 3> cells{1, 1, 1};
  for (int k = 0; k < d; ++k) cells[k] = grid.cells[k];
  for (int c3 = 0; c3 < cells[2]; ++c3) {
    for (int c2 = 0; c2 < cells[1]; ++c2) {
      for (int c1 = 0; c1 < cells[0]; ++c1) {
        for (int a = 0; a < local_nodes; ++a) {
          const std::array<int, 3> ja{c1 + (a & 1), c2 + (a >> 1 & 1), c3 + (a >> 2 & 1)};
          bool a_in = true;
          for (int k = 0; k < d; ++k) a_in = a_in && ja[k] >= 1 && ja[k] <= cells[k] - 1;
          if (!a_in) continue;
          for (int b = 0; b < local_nodes; ++b) {
            const std::array<int, 3> jb{c1 + (b & 1), c2 + (b >> 1 & 1), c3 + (b >> 2 & 1)};
            bool b_in = true;
            for (int k = 0; k < d; ++k) b_in = b_in && jb[k] >= 1 && jb[k] <= cells[k] - 1;
            if (!b_in) continue;
            A(static_cast<std::size_t>(dof_of(ja)), static_cast<std::size_t>(dof_of(jb))) +=
                local[static_cast<std::size_t>(a) * local_nodes + b];
          }
        }
      }
    }
  }
  return A;
}

}  // namespace ellspec::testing
