#include "ellspec/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace ellspec::assembly {

namespace {

using mesh::MultiIndex;

// Q1 shape function factor and its derivative on [0,1]: node bit 0 is 1-t,
// node bit 1 is t.
double shape1(double t, int bit) { return bit ? t : 1.0 - t; }
double dshape1(int bit) { return bit ? 1.0 : -1.0; }

struct LocalBasis {
  int dim;
  int nodes;  // 2^dim
  int qps;
  // grad[k][q*nodes + a] = dN_a/dxi_k at quadrature point q
  std::array<std::vector<double>, mesh::kMaxDim> grad;

  LocalBasis(const QuadratureRule& quad, int d) : dim(d) {
    nodes = 1 << d;
    qps = static_cast<int>(quad.points.size());
    for (int k = 0; k < d; ++k) grad[k].assign(static_cast<std::size_t>(qps) * nodes, 0.0);
    for (int q = 0; q < qps; ++q) {
      const Point& xi = quad.points[static_cast<std::size_t>(q)];
      for (int a = 0; a < nodes; ++a) {
        for (int k = 0; k < d; ++k) {
          double g = dshape1(a >> k & 1);
          for (int l = 0; l < d; ++l) {
            if (l != k) g *= shape1(xi[l], a >> l & 1);
          }
          grad[k][static_cast<std::size_t>(q) * nodes + a] = g;
        }
      }
    }
  }
};

// CSR pattern of the Q1 stencil: row i couples to interior nodes within the
// 3^d neighborhood. Two passes: count, then fill each sorted row in place.
SparseMatrix make_pattern(const StructuredGrid& grid) {
  const int d = grid.dim();
  SparseMatrix M;
  M.n = grid.interior_dofs;
  M.row_ptr.assign(M.n + 1, 0);

  int total = 1;
  for (int k = 0; k < d; ++k) total *= 3;

  std::vector<std::uint32_t> row;
  row.reserve(static_cast<std::size_t>(total));
  auto collect_row = [&](std::size_t dof) {
    const MultiIndex j = mesh::dof_to_lattice(grid, dof);
    row.clear();
    MultiIndex nb{1, 1, 1};
    for (int flat = 0; flat < total; ++flat) {
      int rest = flat;
      bool ok = true;
      for (int k = 0; k < d; ++k) {
        const int delta = rest % 3 - 1;
        rest /= 3;
        nb[k] = j[k] + delta;
        ok = ok && nb[k] >= 1 && nb[k] <= grid.cells[k] - 1;
      }
      if (ok) row.push_back(static_cast<std::uint32_t>(mesh::lattice_to_dof(grid, nb)));
    }
    std::sort(row.begin(), row.end());
  };

  for (std::size_t dof = 0; dof < M.n; ++dof) {
    collect_row(dof);
    M.row_ptr[dof + 1] = M.row_ptr[dof] + row.size();
  }
  M.col_idx.resize(M.row_ptr[M.n]);
  M.values.assign(M.row_ptr[M.n], 0.0);
  for (std::size_t dof = 0; dof < M.n; ++dof) {
    collect_row(dof);
    std::copy(row.begin(), row.end(), M.col_idx.begin() +
                                          static_cast<std::ptrdiff_t>(M.row_ptr[dof]));
  }
  return M;
}

template <typename Kappa>
SparseMatrix assemble(const StructuredGrid& grid, const QuadratureRule& quad,
                      Kappa&& kappa) {
  const int d = grid.dim();
  SparseMatrix M = make_pattern(grid);
  const LocalBasis basis(quad, d);
  const int nodes = basis.nodes;
  const int qps = basis.qps;

  double vol = 1.0;
  for (int k = 0; k < d; ++k) vol *= grid.spacing[k];
  std::array<double, mesh::kMaxDim> scale{};
  for (int k = 0; k < d; ++k) scale[k] = vol / (grid.spacing[k] * grid.spacing[k]);

  std::vector<double> local(static_cast<std::size_t>(nodes) * nodes);
  std::vector<std::size_t> dof_of(static_cast<std::size_t>(nodes));
  std::vector<bool> interior(static_cast<std::size_t>(nodes));

  std::size_t cell_total = 1;
  for (int k = 0; k < d; ++k) cell_total *= static_cast<std::size_t>(grid.cells[k]);

  for (std::size_t cidx = 0; cidx < cell_total; ++cidx) {
    MultiIndex c{0, 0, 0};
    std::size_t rest = cidx;
    for (int k = 0; k < d; ++k) {
      c[k] = static_cast<int>(rest % static_cast<std::size_t>(grid.cells[k]));
      rest /= static_cast<std::size_t>(grid.cells[k]);
    }

    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < qps; ++q) {
      Point x{};
      for (int k = 0; k < d; ++k) {
        x[k] = grid.node_coordinate(k, c[k]) +
               quad.points[static_cast<std::size_t>(q)][k] * grid.spacing[k];
      }
      const auto kval = kappa(x);
      const double w = quad.weights[static_cast<std::size_t>(q)];
      for (int k = 0; k < d; ++k) {
        const double fac = w * kval[k] * scale[k];
        const double* g = &basis.grad[k][static_cast<std::size_t>(q) * nodes];
        for (int a = 0; a < nodes; ++a) {
          const double ga = fac * g[a];
          for (int b = 0; b < nodes; ++b) {
            local[static_cast<std::size_t>(a) * nodes + b] += ga * g[b];
          }
        }
      }
    }

    for (int a = 0; a < nodes; ++a) {
      MultiIndex j{1, 1, 1};
      bool ok = true;
      for (int k = 0; k < d; ++k) {
        j[k] = c[k] + (a >> k & 1);
        ok = ok && j[k] >= 1 && j[k] <= grid.cells[k] - 1;
      }
      interior[static_cast<std::size_t>(a)] = ok;
      dof_of[static_cast<std::size_t>(a)] = ok ? mesh::lattice_to_dof(grid, j) : 0;
    }
    for (int a = 0; a < nodes; ++a) {
      if (!interior[static_cast<std::size_t>(a)]) continue;
      for (int b = 0; b < nodes; ++b) {
        if (!interior[static_cast<std::size_t>(b)]) continue;
        double* slot = M.find(dof_of[static_cast<std::size_t>(a)],
                              static_cast<std::uint32_t>(dof_of[static_cast<std::size_t>(b)]));
        *slot += local[static_cast<std::size_t>(a) * nodes + b];
      }
    }
  }
  return M;
}

}  // namespace

QuadratureRule QuadratureRule::make(Kind kind, int dim) {
  if (dim < 1 || dim > mesh::kMaxDim) {
    throw std::invalid_argument("quadrature dimension must be 1, 2 or 3");
  }
  QuadratureRule q;
  q.kind = kind;
  if (kind == Kind::centroid) {
    Point p{};
    for (int k = 0; k < dim; ++k) p[k] = 0.5;
    q.points.push_back(p);
    q.weights.push_back(1.0);
    return q;
  }
  const double off = 0.5 / std::sqrt(3.0);
  const int count = 1 << dim;
  const double w = 1.0 / count;
  for (int c = 0; c < count; ++c) {
    Point p{};
    for (int k = 0; k < dim; ++k) p[k] = 0.5 + ((c >> k & 1) ? off : -off);
    q.points.push_back(p);
    q.weights.push_back(w);
  }
  return q;
}

SparseMatrix assemble_stiffness(const StructuredGrid& grid,
                                const coeff::DiagonalTensorField& field,
                                const QuadratureRule& quad) {
  if (field.dim() != grid.dim()) {
    throw std::invalid_argument("field and grid dimensions differ");
  }
  return assemble(grid, quad, [&](const Point& x) { return field.eval(x); });
}

SparseMatrix assemble_laplacian(const StructuredGrid& grid, QuadratureRule::Kind kind) {
  const QuadratureRule quad = QuadratureRule::make(kind, grid.dim());
  std::array<double, mesh::kMaxDim> ones{1.0, 1.0, 1.0};
  return assemble(grid, quad, [&](const Point&) { return ones; });
}

Vec interpolate(const StructuredGrid& grid,
                const std::function<double(const Point&)>& f) {
  Vec v(grid.interior_dofs);
  for (std::size_t dof = 0; dof < grid.interior_dofs; ++dof) {
    v[dof] = f(mesh::node_coords(grid, dof));
  }
  return v;
}

}  // namespace ellspec::assembly
