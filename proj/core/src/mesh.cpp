#include "ellspec/mesh.hpp"

#include <stdexcept>
#include <string>

namespace ellspec::mesh {

BoxDomain BoxDomain::make(int dim, const Point& lo, const Point& hi) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("domain dimension must be 1, 2 or 3, got " +
                                std::to_string(dim));
  }
  BoxDomain d;
  d.dim = dim;
  for (int k = 0; k < dim; ++k) {
    if (!(lo[k] < hi[k])) {
      throw std::invalid_argument("domain.lo must be < domain.hi on axis " +
                                  std::to_string(k + 1));
    }
    d.lo[k] = lo[k];
    d.hi[k] = hi[k];
  }
  return d;
}

bool BoxDomain::contains(const Point& x) const {
  for (int k = 0; k < dim; ++k) {
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  }
  return true;
}

double StructuredGrid::max_spacing() const {
  double h = 0.0;
  for (int k = 0; k < domain.dim; ++k) h = spacing[k] > h ? spacing[k] : h;
  return h;
}

double StructuredGrid::node_coordinate(int axis, int j) const {
  if (axis >= domain.dim) return 0.0;
  return domain.lo[axis] +
         (static_cast<double>(j) * domain.extent(axis)) / cells[axis];
}

StructuredGrid build_grid(const BoxDomain& domain, const MultiIndex& cells) {
  StructuredGrid g;
  g.domain = domain;
  g.total_nodes = 1;
  g.interior_dofs = 1;
  for (int k = 0; k < domain.dim; ++k) {
    if (cells[k] < 2) {
      throw std::invalid_argument(
          "grid.cells must be >= 2 on every axis (no interior DOF otherwise), "
          "got " + std::to_string(cells[k]) + " on axis " + std::to_string(k + 1));
    }
    g.cells[k] = cells[k];
    g.spacing[k] = domain.extent(k) / cells[k];
    g.total_nodes *= static_cast<std::size_t>(cells[k] + 1);
    g.interior_dofs *= static_cast<std::size_t>(cells[k] - 1);
  }
  return g;
}

MultiIndex dof_to_lattice(const StructuredGrid& grid, std::size_t dof) {
  if (dof >= grid.interior_dofs) {
    throw std::out_of_range("interior DOF index " + std::to_string(dof) +
                            " out of range (grid has " +
                            std::to_string(grid.interior_dofs) + ")");
  }
  MultiIndex j{0, 0, 0};
  std::size_t rest = dof;
  for (int k = 0; k < grid.dim(); ++k) {
    const std::size_t m = static_cast<std::size_t>(grid.interior_per_axis(k));
    j[k] = static_cast<int>(rest % m) + 1;
    rest /= m;
  }
  return j;
}

std::size_t lattice_to_dof(const StructuredGrid& grid, const MultiIndex& j) {
  std::size_t dof = 0;
  for (int k = grid.dim() - 1; k >= 0; --k) {
    dof = dof * static_cast<std::size_t>(grid.interior_per_axis(k)) +
          static_cast<std::size_t>(j[k] - 1);
  }
  return dof;
}

Point node_coords(const StructuredGrid& grid, std::size_t dof) {
  const MultiIndex j = dof_to_lattice(grid, dof);
  Point x{};
  for (int k = 0; k < grid.dim(); ++k) x[k] = grid.node_coordinate(k, j[k]);
  return x;
}

}  // namespace ellspec::mesh
