#pragma once

#include <functional>
#include <vector>

#include "ellspec/coefficients.hpp"
#include "ellspec/linalg.hpp"
#include "ellspec/mesh.hpp"

namespace ellspec::assembly {

using linalg::SparseMatrix;
using linalg::Vec;
using mesh::Point;
using mesh::StructuredGrid;

/// Quadrature on the reference cell [0,1]^d. `centroid` is the single
/// midpoint with weight 1; `gauss2` the 2^d tensor Gauss rule, exact for the
/// Q1 stiffness integrand with cellwise-constant coefficients.
struct QuadratureRule {
  enum class Kind { centroid, gauss2 };

  Kind kind = Kind::gauss2;
  std::vector<Point> points;    // reference coordinates
  std::vector<double> weights;  // positive, summing to 1

  static QuadratureRule make(Kind kind, int dim);
};

/// Stiffness form of -div(K grad u) over interior DOFs: multilinear Q1 basis,
/// K sampled at quadrature points, boundary rows/columns eliminated.
/// entry(i,j) = sum_cells sum_qp w * sum_k kappa_k(x_qp) dphi_i/dx_k dphi_j/dx_k.
SparseMatrix assemble_stiffness(const StructuredGrid& grid,
                                const coeff::DiagonalTensorField& field,
                                const QuadratureRule& quad);

/// Stiffness form of -Laplace (K = I) with the same element and rule.
SparseMatrix assemble_laplacian(
    const StructuredGrid& grid,
    QuadratureRule::Kind kind = QuadratureRule::Kind::gauss2);

/// Nodal values of f at the interior nodes, in DOF order.
Vec interpolate(const StructuredGrid& grid,
                const std::function<double(const Point&)>& f);

}  // namespace ellspec::assembly
