#include <doctest.h>

#include <cmath>
#include <random>

#include "ellspec/assembly.hpp"
#include "ellspec/coefficients.hpp"
#include "ellspec/linalg.hpp"
#include "ellspec/mesh.hpp"
#include "oracles.hpp"

using namespace ellspec;
using assembly::QuadratureRule;
using coeff::DiagonalTensorField;
using linalg::SparseMatrix;
using linalg::Vec;
using mesh::BoxDomain;
using mesh::Point;

namespace {

const BoxDomain kCube = BoxDomain::make(3, {0, 0, 0}, {1, 1, 1});
const BoxDomain kInterval = BoxDomain::make(1, {0, 0, 0}, {1, 0, 0});
const BoxDomain kSquare = BoxDomain::make(2, {0, 0, 0}, {1, 1, 0});

DiagonalTensorField constant_field(const BoxDomain& dom, double a, double b, double c) {
  return DiagonalTensorField(dom, DiagonalTensorField::Constant{{a, b, c}});
}

bool same_structure(const SparseMatrix& A, const SparseMatrix& B) {
  return A.n == B.n && A.row_ptr == B.row_ptr && A.col_idx == B.col_idx;
}

}  // namespace

TEST_CASE("quadrature weights are positive and sum to the reference volume") {
  for (int d = 1; d <= 3; ++d) {
    for (auto kind : {QuadratureRule::Kind::centroid, QuadratureRule::Kind::gauss2}) {
      const auto q = QuadratureRule::make(kind, d);
      double sum = 0.0;
      for (double w : q.weights) {
        CHECK(w > 0.0);
        sum += w;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(q.points.size() == (kind == QuadratureRule::Kind::centroid
                                    ? 1u
                                    : (1u << d)));
    }
  }
}

TEST_CASE("1D stiffness: cells=2 gives [2/h] = [4]") {
  const auto grid = mesh::build_grid(kInterval, {2, 1, 1});
  const auto A = assembly::assemble_stiffness(
      grid, constant_field(kInterval, 1, 0, 0), QuadratureRule::make(QuadratureRule::Kind::gauss2, 1));
  REQUIRE(A.n == 1);
  CHECK(A.values[0] == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("1D Laplacian: cells=4 gives tridiag(-4, 8, -4)") {
  const auto grid = mesh::build_grid(kInterval, {4, 1, 1});
  const auto L = assembly::assemble_laplacian(grid);
  REQUIRE(L.n == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(*L.find(i, static_cast<std::uint32_t>(i)) == doctest::Approx(8.0).epsilon(1e-14));
    if (i > 0) {
      CHECK(*L.find(i, static_cast<std::uint32_t>(i - 1)) ==
            doctest::Approx(-4.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("2D Laplacian: (2,2) cells give the single entry 8/3") {
  const auto grid = mesh::build_grid(kSquare, {2, 2, 1});
  const auto L = assembly::assemble_laplacian(grid);
  REQUIRE(L.n == 1);
  CHECK(L.values[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("K = I reproduces the Laplacian entrywise exactly") {
  const auto grid = mesh::build_grid(kCube, {3, 4, 5});
  for (auto kind : {QuadratureRule::Kind::gauss2, QuadratureRule::Kind::centroid}) {
    const auto A = assembly::assemble_stiffness(grid, constant_field(kCube, 1, 1, 1),
                                                QuadratureRule::make(kind, 3));
    const auto L = assembly::assemble_laplacian(grid, kind);
    CHECK(same_structure(A, L));
    CHECK(A.values == L.values);  // bitwise
  }
}

TEST_CASE("centroid equals gauss2 in 1D; they differ in 2D") {
  const auto line = mesh::build_grid(kInterval, {6, 1, 1});
  const auto L1c = assembly::assemble_laplacian(line, QuadratureRule::Kind::centroid);
  const auto L1g = assembly::assemble_laplacian(line, QuadratureRule::Kind::gauss2);
  REQUIRE(same_structure(L1c, L1g));
  for (std::size_t p = 0; p < L1c.nnz(); ++p) {
    CHECK(L1c.values[p] == doctest::Approx(L1g.values[p]).epsilon(1e-14));
  }

  // in d >= 2 the centroid rule underintegrates the Q1 stiffness integrand:
  // the cross terms of grad(N_a).grad(N_b) are quadratic per direction
  const auto square = mesh::build_grid(kSquare, {3, 3, 1});
  const auto L2c = assembly::assemble_laplacian(square, QuadratureRule::Kind::centroid);
  const auto L2g = assembly::assemble_laplacian(square, QuadratureRule::Kind::gauss2);
  bool any_difference = false;
  for (std::size_t p = 0; p < L2c.nnz(); ++p) {
    any_difference = any_difference || std::abs(L2c.values[p] - L2g.values[p]) > 1e-12;
  }
  CHECK(any_difference);
}

TEST_CASE("rows with a fully interior stencil sum to zero") {
  const auto grid = mesh::build_grid(kCube, {4, 4, 4});
  const auto L = assembly::assemble_laplacian(grid);
  const std::size_t center = mesh::lattice_to_dof(grid, {2, 2, 2});
  double row_sum = 0.0;
  for (std::size_t p = L.row_ptr[center]; p < L.row_ptr[center + 1]; ++p) {
    row_sum += L.values[p];
  }
  CHECK(row_sum == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("assembled matrices are exactly symmetric") {
  const auto grid = mesh::build_grid(kCube, {3, 3, 3});
  const auto field = coeff::builtin_preset("smooth-radial");
  const auto A = assembly::assemble_stiffness(
      grid, field, QuadratureRule::make(QuadratureRule::Kind::gauss2, 3));
  for (std::size_t i = 0; i < A.n; ++i) {
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
      const double* mirror = A.find(A.col_idx[p], static_cast<std::uint32_t>(i));
      REQUIRE(mirror != nullptr);
      CHECK(*mirror == A.values[p]);  // assembly visits symmetric pairs identically
    }
  }
}

TEST_CASE("positivity of the quadratic form") {
  const auto grid = mesh::build_grid(kCube, {3, 3, 3});
  const auto A = assembly::assemble_stiffness(
      grid, constant_field(kCube, 1, 2, 3),
      QuadratureRule::make(QuadratureRule::Kind::gauss2, 3));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vec x(A.n);
    for (double& v : x) v = u(rng);
    CHECK(linalg::l_inner(A, x, x) > 0.0);
  }
}

TEST_CASE("doubling K doubles A exactly") {
  const auto grid = mesh::build_grid(kCube, {3, 3, 3});
  const auto quad = QuadratureRule::make(QuadratureRule::Kind::gauss2, 3);
  const auto A1 = assembly::assemble_stiffness(grid, constant_field(kCube, 1, 2, 3), quad);
  const auto A2 = assembly::assemble_stiffness(grid, constant_field(kCube, 2, 4, 6), quad);
  REQUIRE(same_structure(A1, A2));
  for (std::size_t p = 0; p < A1.nnz(); ++p) {
    CHECK(A2.values[p] == 2.0 * A1.values[p]);  // bitwise: products scale exactly
  }
}

TEST_CASE("gauss2 assembly matches the exact-integration oracle at 1e-13") {
  const auto grid = mesh::build_grid(kCube, {4, 4, 4});
  const auto A = assembly::assemble_stiffness(
      grid, constant_field(kCube, 1, 2, 3),
      QuadratureRule::make(QuadratureRule::Kind::gauss2, 3));
  const auto oracle = testing::exact_constant_stiffness(grid, {1, 2, 3});

  double max_entry = 0.0, max_diff = 0.0;
  for (std::size_t i = 0; i < A.n; ++i) {
    for (std::size_t j = 0; j < A.n; ++j) {
      const double* stored = A.find(i, static_cast<std::uint32_t>(j));
      const double a = stored != nullptr ? *stored : 0.0;
      max_entry = std::max(max_entry, std::abs(oracle(i, j)));
      max_diff = std::max(max_diff, std::abs(a - oracle(i, j)));
    }
  }
  CHECK(max_diff <= 1e-13 * max_entry);
}

TEST_CASE("discrete comparison identity: quadrature-point hull bounds the form ratio") {
  const auto grid = mesh::build_grid(kCube, {4, 4, 4});
  const auto field = coeff::builtin_preset("smooth-radial");
  const auto quad = QuadratureRule::make(QuadratureRule::Kind::gauss2, 3);
  const auto A = assembly::assemble_stiffness(grid, field, quad);
  const auto L = assembly::assemble_laplacian(grid);

  // hull over the very quadrature samples the assembly used
  double qlo = 1e300, qhi = -1e300;
  for (int c3 = 0; c3 < 4; ++c3) {
    for (int c2 = 0; c2 < 4; ++c2) {
      for (int c1 = 0; c1 < 4; ++c1) {
        for (const auto& xi : quad.points) {
          Point x{grid.node_coordinate(0, c1) + xi[0] * grid.spacing[0],
                  grid.node_coordinate(1, c2) + xi[1] * grid.spacing[1],
                  grid.node_coordinate(2, c3) + xi[2] * grid.spacing[2]};
          for (double k : field.eval(x)) {
            qlo = std::min(qlo, k);
            qhi = std::max(qhi, k);
          }
        }
      }
    }
  }

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(A.n);
    for (double& v : x) v = u(rng);
    const double ax = linalg::l_inner(A, x, x);
    const double lx = linalg::l_inner(L, x, x);
    CHECK(ax >= qlo * lx * (1.0 - 1e-12));
    CHECK(ax <= qhi * lx * (1.0 + 1e-12));
  }
}

TEST_CASE("interpolate") {
  const auto grid = mesh::build_grid(kInterval, {4, 1, 1});
  CHECK(assembly::interpolate(grid, [](const Point&) { return 0.0; }) == Vec{0, 0, 0});
  CHECK(assembly::interpolate(grid, [](const Point&) { return 1.0; }) == Vec{1, 1, 1});
  const Vec x1 = assembly::interpolate(grid, [](const Point& x) { return x[0]; });
  CHECK(x1[0] == doctest::Approx(0.25));
  CHECK(x1[1] == doctest::Approx(0.5));
  CHECK(x1[2] == doctest::Approx(0.75));
}
