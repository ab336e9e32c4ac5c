#include "ellspec/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ellspec::coeff {

namespace {

// Visits the corners of a box (2^dim points).
template <typename F>
void for_each_corner(int dim, const Point& lo, const Point& hi, F&& f) {
  const int corners = 1 << dim;
  for (int c = 0; c < corners; ++c) {
    Point x{};
    for (int k = 0; k < dim; ++k) x[k] = (c >> k & 1) ? hi[k] : lo[k];
    f(x);
  }
}

Point box_center(int dim, const Point& lo, const Point& hi) {
  Point x{};
  for (int k = 0; k < dim; ++k) x[k] = 0.5 * (lo[k] + hi[k]);
  return x;
}

Point clamp_to(const BoxDomain& d, Point x) {
  for (int k = 0; k < d.dim; ++k) x[k] = std::clamp(x[k], d.lo[k], d.hi[k]);
  return x;
}

}  // namespace

DiagonalTensorField::DiagonalTensorField(BoxDomain domain, Kind kind)
    : domain_(domain), kind_(std::move(kind)) {
  if (const auto* aff = std::get_if<AxisAffine>(&kind_)) {
    for (int k = 0; k < domain_.dim; ++k) {
      if (aff->coords[k] < 0 || aff->coords[k] >= domain_.dim) {
        throw std::invalid_argument("axis-affine coordinate index out of range");
      }
    }
  }
  if (const auto* sr = std::get_if<SmoothRadial>(&kind_)) {
    if (!(sr->width > 0.0)) {
      throw std::invalid_argument("smooth-radial width must be positive");
    }
  }
  validate_ellipticity();
}

std::string DiagonalTensorField::kind_name() const {
  struct Namer {
    std::string operator()(const Constant&) const { return "constant"; }
    std::string operator()(const AxisAffine&) const { return "axis_affine"; }
    std::string operator()(const PiecewiseConstant&) const { return "piecewise_constant"; }
    std::string operator()(const SmoothRadial&) const { return "smooth_radial"; }
  };
  return std::visit(Namer{}, kind_);
}

std::array<double, mesh::kMaxDim> DiagonalTensorField::eval(const Point& x) const {
  if (!domain_.contains(x)) {
    throw std::invalid_argument("coefficient evaluated outside the closed domain box");
  }
  return eval_unchecked(x);
}

std::array<double, mesh::kMaxDim> DiagonalTensorField::eval_unchecked(const Point& x) const {
  std::array<double, mesh::kMaxDim> k{};
  const int d = domain_.dim;
  if (const auto* c = std::get_if<Constant>(&kind_)) {
    for (int i = 0; i < d; ++i) k[i] = c->values[i];
  } else if (const auto* a = std::get_if<AxisAffine>(&kind_)) {
    for (int i = 0; i < d; ++i) k[i] = a->offsets[i] + a->slopes[i] * x[a->coords[i]];
  } else if (const auto* p = std::get_if<PiecewiseConstant>(&kind_)) {
    for (int i = 0; i < d; ++i) k[i] = p->background[i];
    for (const Box& b : p->boxes) {
      bool in = true;
      for (int i = 0; i < d; ++i) in = in && x[i] >= b.lo[i] && x[i] <= b.hi[i];
      if (in) {
        for (int i = 0; i < d; ++i) k[i] = b.values[i];
        break;  // first-listed box wins
      }
    }
  } else {
    const auto& s = std::get<SmoothRadial>(kind_);
    double dist2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double t = x[i] - s.center[i];
      dist2 += t * t;
    }
    const double v = s.base + s.amplitude * std::exp(-dist2 / (s.width * s.width));
    for (int i = 0; i < d; ++i) k[i] = v;
  }
  return k;
}

std::vector<Point> DiagonalTensorField::critical_points() const {
  std::vector<Point> pts;
  for_each_corner(domain_.dim, domain_.lo, domain_.hi,
                  [&](const Point& x) { pts.push_back(x); });
  if (const auto* p = std::get_if<PiecewiseConstant>(&kind_)) {
    for (const Box& b : p->boxes) {
      pts.push_back(clamp_to(domain_, box_center(domain_.dim, b.lo, b.hi)));
      for_each_corner(domain_.dim, b.lo, b.hi,
                      [&](const Point& x) { pts.push_back(clamp_to(domain_, x)); });
    }
  } else if (const auto* s = std::get_if<SmoothRadial>(&kind_)) {
    pts.push_back(clamp_to(domain_, s->center));
  }
  return pts;
}

void DiagonalTensorField::validate_ellipticity() const {
  // Extremes of every built-in family lie on this sample set: a coarse
  // lattice plus the critical points.
  const int n = 9;
  double min_val = std::numeric_limits<double>::infinity();
  auto scan = [&](const Point& x) {
    const auto k = eval_unchecked(x);
    for (int i = 0; i < domain_.dim; ++i) min_val = std::min(min_val, k[i]);
  };
  mesh::MultiIndex idx{0, 0, 0};
  const int d = domain_.dim;
  int total = 1;
  for (int k = 0; k < d; ++k) total *= n + 1;
  for (int flat = 0; flat < total; ++flat) {
    int rest = flat;
    Point x{};
    for (int k = 0; k < d; ++k) {
      idx[k] = rest % (n + 1);
      rest /= n + 1;
      x[k] = domain_.lo[k] + (static_cast<double>(idx[k]) * domain_.extent(k)) / n;
    }
    scan(x);
  }
  for (const Point& x : critical_points()) scan(x);
  if (!(min_val > 0.0)) {
    throw std::invalid_argument(
        "coefficient field is not uniformly elliptic: sampled kappa <= 0");
  }
}

HullEstimate estimate_hull(const DiagonalTensorField& field,
                           const mesh::StructuredGrid& grid, int oversample) {
  HullEstimate h;
  h.lo = std::numeric_limits<double>::infinity();
  h.hi = -std::numeric_limits<double>::infinity();
  const int d = field.dim();

  auto scan = [&](const Point& x) {
    const auto k = field.eval(x);
    for (int i = 0; i < d; ++i) {
      h.lo = std::min(h.lo, k[i]);
      h.hi = std::max(h.hi, k[i]);
    }
    ++h.samples_used;
  };

  // Lattices with cells*f nodes for f = 1..oversample (f = 1 is the grid's
  // own node set), then cell centroids, then the field's critical points.
  const BoxDomain& dom = grid.domain;
  for (int f = 1; f <= std::max(1, oversample); ++f) {
    mesh::MultiIndex counts{1, 1, 1};
    for (int k = 0; k < d; ++k) counts[k] = grid.cells[k] * f;
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(counts[k] + 1);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      Point x{};
      for (int k = 0; k < d; ++k) {
        const int j = static_cast<int>(rest % static_cast<std::size_t>(counts[k] + 1));
        rest /= static_cast<std::size_t>(counts[k] + 1);
        x[k] = dom.lo[k] + (static_cast<double>(j) * dom.extent(k)) / counts[k];
      }
      scan(x);
    }
  }
  {
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(grid.cells[k]);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      Point x{};
      for (int k = 0; k < d; ++k) {
        const int c = static_cast<int>(rest % static_cast<std::size_t>(grid.cells[k]));
        rest /= static_cast<std::size_t>(grid.cells[k]);
        x[k] = dom.lo[k] + ((static_cast<double>(c) + 0.5) * dom.extent(k)) / grid.cells[k];
      }
      scan(x);
    }
  }
  for (const Point& x : field.critical_points()) scan(x);
  return h;
}

DiagonalTensorField builtin_preset(const std::string& name) {
  const BoxDomain cube = BoxDomain::make(3, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  if (name == "const-iso") {
    return DiagonalTensorField(cube, DiagonalTensorField::Constant{{2.0, 2.0, 2.0}});
  }
  if (name == "const-aniso") {
    return DiagonalTensorField(cube, DiagonalTensorField::Constant{{1.0, 2.0, 3.0}});
  }
  if (name == "axis-affine") {
    return DiagonalTensorField(
        cube, DiagonalTensorField::AxisAffine{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {0, 0, 0}});
  }
  if (name == "piecewise-box") {
    DiagonalTensorField::PiecewiseConstant pc;
    pc.background = {1.0, 1.0, 1.0};
    pc.boxes.push_back({{0.25, 0.25, 0.25}, {0.75, 0.75, 0.75}, {4.0, 4.0, 4.0}});
    return DiagonalTensorField(cube, std::move(pc));
  }
  if (name == "smooth-radial") {
    return DiagonalTensorField(
        cube, DiagonalTensorField::SmoothRadial{1.0, 2.0, 0.5, {0.25, 0.25, 0.25}});
  }
  throw std::invalid_argument("unknown field preset '" + name + "'");
}

std::vector<std::string> builtin_preset_names() {
  return {"const-iso", "const-aniso", "axis-affine", "piecewise-box", "smooth-radial"};
}

}  // namespace ellspec::coeff
