#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ellspec/coefficients.hpp"
#include "ellspec/mesh.hpp"

using namespace ellspec;
using coeff::DiagonalTensorField;
using mesh::BoxDomain;
using mesh::Point;

namespace {
const BoxDomain kCube = BoxDomain::make(3, {0, 0, 0}, {1, 1, 1});

DiagonalTensorField constant123() {
  return DiagonalTensorField(kCube, DiagonalTensorField::Constant{{1, 2, 3}});
}
}  // namespace

TEST_CASE("constant evaluation") {
  const auto f = constant123();
  const auto k = f.eval({0.3, 0.7, 0.1});
  CHECK(k[0] == 1.0);
  CHECK(k[1] == 2.0);
  CHECK(k[2] == 3.0);
}

TEST_CASE("axis-affine evaluation: kappa_i = 1 + x1") {
  const DiagonalTensorField f(
      kCube, DiagonalTensorField::AxisAffine{{1, 1, 1}, {1, 1, 1}, {0, 0, 0}});
  const auto k = f.eval({0.5, 0.0, 0.0});
  CHECK(k[0] == doctest::Approx(1.5));
  CHECK(k[1] == doctest::Approx(1.5));
  CHECK(k[2] == doctest::Approx(1.5));
}

TEST_CASE("piecewise-constant evaluation and face convention") {
  const auto f = coeff::builtin_preset("piecewise-box");
  CHECK(f.eval({0.5, 0.5, 0.5})[0] == 4.0);
  CHECK(f.eval({0.1, 0.1, 0.1})[0] == 1.0);
  // a point on the box face takes the box value
  CHECK(f.eval({0.25, 0.5, 0.5})[0] == 4.0);

  // first-listed box wins on overlap
  DiagonalTensorField::PiecewiseConstant pc;
  pc.background = {1, 1, 1};
  pc.boxes.push_back({{0.0, 0.0, 0.0}, {0.5, 1.0, 1.0}, {7, 7, 7}});
  pc.boxes.push_back({{0.25, 0.0, 0.0}, {1.0, 1.0, 1.0}, {9, 9, 9}});
  const DiagonalTensorField g(kCube, pc);
  CHECK(g.eval({0.3, 0.5, 0.5})[0] == 7.0);
  CHECK(g.eval({0.75, 0.5, 0.5})[0] == 9.0);
}

TEST_CASE("evaluation outside the closed domain is rejected") {
  const auto f = constant123();
  CHECK_THROWS_AS((void)f.eval({1.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS((void)f.eval({0.5, -0.01, 0.5}), std::invalid_argument);
  CHECK_NOTHROW((void)f.eval({1.0, 1.0, 1.0}));  // closure included
}

TEST_CASE("ellipticity is validated at construction") {
  CHECK_THROWS_AS(
      DiagonalTensorField(kCube, DiagonalTensorField::Constant{{1, -2, 3}}),
      std::invalid_argument);
  // 1 - 2*x1 dips negative inside the cube
  CHECK_THROWS_AS(DiagonalTensorField(
                      kCube, DiagonalTensorField::AxisAffine{
                                 {1, 1, 1}, {-2, 0, 0}, {0, 0, 0}}),
                  std::invalid_argument);
}

TEST_CASE("hull estimates match the known hulls") {
  const auto grid = mesh::build_grid(kCube, {4, 4, 4});
  SUBCASE("constant") {
    const auto h = coeff::estimate_hull(constant123(), grid, 2);
    CHECK(h.lo == 1.0);
    CHECK(h.hi == 3.0);
  }
  SUBCASE("axis-affine 1+x1 on the unit cube") {
    const auto h = coeff::estimate_hull(coeff::builtin_preset("axis-affine"), grid, 2);
    CHECK(h.lo == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(h.hi == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("piecewise box") {
    const auto h = coeff::estimate_hull(coeff::builtin_preset("piecewise-box"), grid, 2);
    CHECK(h.lo == 1.0);
    CHECK(h.hi == 4.0);
  }
  SUBCASE("smooth radial peaks at the center sample") {
    const auto f = coeff::builtin_preset("smooth-radial");
    const auto h = coeff::estimate_hull(f, grid, 2);
    CHECK(h.hi == doctest::Approx(3.0).epsilon(1e-15));  // base + amplitude
    CHECK(h.lo > 1.0);
    CHECK(h.lo < 1.01);  // far-corner falloff
  }
}

TEST_CASE("finite sampling stays inside the true hull (axis-affine)") {
  const auto f = coeff::builtin_preset("axis-affine");
  const auto grid = mesh::build_grid(kCube, {3, 3, 3});
  for (int oversample : {1, 2, 3, 5}) {
    const auto h = coeff::estimate_hull(f, grid, oversample);
    CHECK(h.lo >= 1.0);
    CHECK(h.hi <= 2.0);
  }
}

TEST_CASE("increasing oversample never shrinks the interval") {
  const auto f = coeff::builtin_preset("smooth-radial");
  const auto grid = mesh::build_grid(kCube, {3, 3, 3});
  auto prev = coeff::estimate_hull(f, grid, 1);
  for (int oversample = 2; oversample <= 5; ++oversample) {
    const auto cur = coeff::estimate_hull(f, grid, oversample);
    CHECK(cur.lo <= prev.lo);
    CHECK(cur.hi >= prev.hi);
    prev = cur;
  }
}

TEST_CASE("preset registry") {
  CHECK(coeff::builtin_preset_names().size() == 5);
  for (const auto& name : coeff::builtin_preset_names()) {
    CHECK_NOTHROW((void)coeff::builtin_preset(name));
  }
  CHECK_THROWS_AS((void)coeff::builtin_preset("nope"), std::invalid_argument);
}
