#include <doctest.h>

#include <set>
#include <stdexcept>

#include "ellspec/mesh.hpp"

using namespace ellspec;
using mesh::BoxDomain;
using mesh::MultiIndex;
using mesh::Point;

namespace {
const BoxDomain kUnitCube = BoxDomain::make(3, {0, 0, 0}, {1, 1, 1});
const BoxDomain kUnitInterval = BoxDomain::make(1, {0, 0, 0}, {1, 0, 0});
const BoxDomain kUnitSquare = BoxDomain::make(2, {0, 0, 0}, {1, 1, 0});
}  // namespace

TEST_CASE("grid counts and spacing") {
  auto g = mesh::build_grid(kUnitCube, {2, 2, 2});
  CHECK(g.interior_dofs == 1);
  CHECK(g.total_nodes == 27);

  g = mesh::build_grid(kUnitCube, {4, 4, 4});
  CHECK(g.interior_dofs == 27);
  CHECK(g.total_nodes == 125);

  g = mesh::build_grid(kUnitInterval, {8, 1, 1});
  CHECK(g.interior_dofs == 7);
  CHECK(g.spacing[0] == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("grid rejects degenerate input") {
  CHECK_THROWS_AS(mesh::build_grid(kUnitCube, {1, 4, 4}), std::invalid_argument);
  CHECK_THROWS_AS(mesh::build_grid(kUnitInterval, {0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(BoxDomain::make(0, {0, 0, 0}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(BoxDomain::make(4, {0, 0, 0}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(BoxDomain::make(2, {0, 1, 0}, {1, 1, 0}), std::invalid_argument);
}

TEST_CASE("node coordinates on the lattice") {
  const auto cube2 = mesh::build_grid(kUnitCube, {2, 2, 2});
  CHECK(mesh::node_coords(cube2, 0) == Point{0.5, 0.5, 0.5});

  const auto line4 = mesh::build_grid(kUnitInterval, {4, 1, 1});
  CHECK(mesh::node_coords(line4, 0)[0] == doctest::Approx(0.25).epsilon(1e-16));

  // x-fastest ordering on a 3x3 square: dofs 0..3 are (1,1),(2,1),(1,2),(2,2)
  const auto square3 = mesh::build_grid(kUnitSquare, {3, 3, 1});
  CHECK(mesh::node_coords(square3, 1)[0] == doctest::Approx(2.0 / 3.0));
  CHECK(mesh::node_coords(square3, 1)[1] == doctest::Approx(1.0 / 3.0));
  CHECK(mesh::node_coords(square3, 3)[0] == doctest::Approx(2.0 / 3.0));
  CHECK(mesh::node_coords(square3, 3)[1] == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(mesh::node_coords(cube2, 1), std::out_of_range);
}

TEST_CASE("interior numbering is a bijection onto distinct lattice points") {
  const auto g = mesh::build_grid(BoxDomain::make(3, {-1, 0, 2}, {1, 3, 5}), {3, 4, 5});
  std::set<Point> seen;
  for (std::size_t dof = 0; dof < g.interior_dofs; ++dof) {
    const auto p = mesh::node_coords(g, dof);
    CHECK(seen.insert(p).second);  // no duplicates
    CHECK(mesh::lattice_to_dof(g, mesh::dof_to_lattice(g, dof)) == dof);
  }
  CHECK(seen.size() == g.interior_dofs);
}

TEST_CASE("refinement nesting: nodes of n-grid are bitwise nodes of 2n-grid") {
  const auto dom = BoxDomain::make(3, {0.1, -0.3, 0.0}, {0.9, 1.1, 0.7});
  const auto coarse = mesh::build_grid(dom, {3, 5, 7});
  const auto fine = mesh::build_grid(dom, {6, 10, 14});
  for (int axis = 0; axis < 3; ++axis) {
    for (int j = 0; j <= coarse.cells[axis]; ++j) {
      CHECK(coarse.node_coordinate(axis, j) == fine.node_coordinate(axis, 2 * j));
    }
  }
}
