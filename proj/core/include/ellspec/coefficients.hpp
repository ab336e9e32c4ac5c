#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "ellspec/mesh.hpp"

namespace ellspec::coeff {

using mesh::BoxDomain;
using mesh::Point;

/// Closed interval bracketing Conv(union of the per-component coefficient
/// ranges over the closed domain). One-dimensional because the convex hull
/// of a union of bounded real sets is an interval.
struct HullEstimate {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t samples_used = 0;
};

/// K(x) = diag(kappa_1(x), ..., kappa_d(x)) with each component equal on all
/// axes unless the family says otherwise. Values are strictly positive on the
/// closed domain (uniform ellipticity), checked by sampling at construction.
class DiagonalTensorField {
 public:
  struct Constant {
    std::array<double, mesh::kMaxDim> values{};
  };
  /// kappa_i(x) = offset[i] + slope[i] * x[coord[i]]  (coord is 0-based).
  struct AxisAffine {
    std::array<double, mesh::kMaxDim> offsets{};
    std::array<double, mesh::kMaxDim> slopes{};
    std::array<int, mesh::kMaxDim> coords{};
  };
  struct Box {
    Point lo{};
    Point hi{};
    std::array<double, mesh::kMaxDim> values{};
  };
  /// First-listed box containing x wins; points on a box face take the box
  /// value. Background applies outside all boxes.
  struct PiecewiseConstant {
    std::array<double, mesh::kMaxDim> background{};
    std::vector<Box> boxes;
  };
  /// kappa_i(x) = base + amplitude * exp(-|x - center|^2 / width^2), all i.
  struct SmoothRadial {
    double base = 1.0;
    double amplitude = 0.0;
    double width = 1.0;
    Point center{};
  };

  using Kind = std::variant<Constant, AxisAffine, PiecewiseConstant, SmoothRadial>;

  DiagonalTensorField(BoxDomain domain, Kind kind);

  int dim() const { return domain_.dim; }
  const BoxDomain& domain() const { return domain_; }
  const Kind& kind() const { return kind_; }
  std::string kind_name() const;

  /// (kappa_1(x), ..., kappa_d(x)); x must lie in the closed domain box.
  std::array<double, mesh::kMaxDim> eval(const Point& x) const;

  /// Points the hull scan must always include so the sampled hull is exact
  /// for every built-in family (Gaussian center, box corners/centers, domain
  /// corners).
  std::vector<Point> critical_points() const;

 private:
  std::array<double, mesh::kMaxDim> eval_unchecked(const Point& x) const;
  void validate_ellipticity() const;

  BoxDomain domain_;
  Kind kind_;
};

/// Interval [min_i inf kappa_i, max_i sup kappa_i] estimated by scanning all
/// grid nodes, cell centroids, every f-times refined lattice for f = 2..
/// oversample, and the field's critical points. Exact for Constant and
/// PiecewiseConstant; never wider than the true hull for the other families.
HullEstimate estimate_hull(const DiagonalTensorField& field,
                           const mesh::StructuredGrid& grid, int oversample);

/// The five built-in d=3 presets on the unit cube, by name:
/// const-iso, const-aniso, axis-affine, piecewise-box, smooth-radial.
DiagonalTensorField builtin_preset(const std::string& name);
std::vector<std::string> builtin_preset_names();

}  // namespace ellspec::coeff
