#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace ellspec::mesh {

inline constexpr int kMaxDim = 3;

/// A point in up to three dimensions; unused trailing coordinates are zero.
using Point = std::array<double, kMaxDim>;

/// Per-axis integer multi-index, padded like Point.
using MultiIndex = std::array<int, kMaxDim>;

/// Axis-aligned box [lo, hi] in d = 1, 2 or 3 dimensions.
struct BoxDomain {
  int dim = 0;
  Point lo{};
  Point hi{};

  /// Validates dim in {1,2,3} and lo[k] < hi[k] on every axis.
  static BoxDomain make(int dim, const Point& lo, const Point& hi);

  double extent(int axis) const { return hi[axis] - lo[axis]; }
  bool contains(const Point& x) const;  // closed box, exact comparisons
};

/// Uniform tensor-product grid on a BoxDomain with homogeneous-Dirichlet
/// interior DOF numbering (boundary nodes are never assigned a DOF).
///
/// Interior DOFs are numbered lexicographically with axis 1 fastest:
///   dof = i1 + m1*(i2 + m2*i3),  i_k = j_k - 1,  m_k = cells[k] - 1,
/// where j_k in 1..cells[k]-1 is the per-axis lattice index.
struct StructuredGrid {
  BoxDomain domain;
  MultiIndex cells{1, 1, 1};     // padded with 1 beyond `domain.dim`
  Point spacing{};               // (hi-lo)/cells; 0 beyond dim
  std::size_t total_nodes = 0;   // prod(cells[k]+1) over real axes
  std::size_t interior_dofs = 0; // prod(cells[k]-1) over real axes

  int dim() const { return domain.dim; }
  int interior_per_axis(int axis) const {
    return axis < domain.dim ? cells[axis] - 1 : 1;
  }
  double max_spacing() const;

  /// Coordinate of lattice node j on `axis`, exactly lo + (j*len)/n.
  /// Computed so that nodes of a grid with cells n are bitwise nodes of the
  /// grid with cells 2n.
  double node_coordinate(int axis, int lattice_index) const;
};

/// Builds a grid; every cell count must be >= 2 so an interior DOF exists.
StructuredGrid build_grid(const BoxDomain& domain, const MultiIndex& cells);

/// Coordinates of interior DOF `dof`; throws std::out_of_range past the end.
Point node_coords(const StructuredGrid& grid, std::size_t dof);

/// Per-axis lattice indices (1..n_k-1) of an interior DOF.
MultiIndex dof_to_lattice(const StructuredGrid& grid, std::size_t dof);

/// Inverse of dof_to_lattice; indices must be interior.
std::size_t lattice_to_dof(const StructuredGrid& grid, const MultiIndex& j);

}  // namespace ellspec::mesh
