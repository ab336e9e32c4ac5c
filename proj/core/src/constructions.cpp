#include "ellspec/constructions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ellspec::probes {

namespace {

constexpr double kPi = std::numbers::pi;

void require_3d(int dim, const char* what) {
  if (dim != 3) {
    throw std::invalid_argument(std::string(what) +
                                ": only the three-dimensional construction is "
                                "implemented (the 2D segment variant is a "
                                "separate construction, not built here)");
  }
}

void planar_axes(int axis, int& p, int& q) {
  // the two axes spanning the disc plane, in ascending order
  p = axis == 0 ? 1 : 0;
  q = axis == 2 ? 1 : 2;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

double distance_to_disc(const Point& x, const Point& x0, double r, int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("disc axis must be in {1,2,3}");
  int p, q;
  planar_axes(axis, p, q);
  const double a = std::abs(x[axis] - x0[axis]);
  const double rho = std::hypot(x[p] - x0[p], x[q] - x0[q]);
  if (rho <= r) return a;
  return std::hypot(a, rho - r);
}

double analytic_vr(const Point& x, const Point& x0, double r, int axis) {
  const double d = distance_to_disc(x, x0, r, axis);
  return std::clamp(1.0 - d / (r * r), 0.0, 1.0);
}

VrProbe build_vr(const StructuredGrid& grid, const Point& x0, int axis, double r) {
  require_3d(grid.dim(), "build_vr");
  if (!(r > 0.0 && r < 1.0)) {
    throw std::invalid_argument("vr radius must lie in (0,1)");
  }
  if (axis < 0 || axis > 2) throw std::invalid_argument("vr axis must be in {1,2,3}");

  // R_r extends r^2 along `axis` and r + r^2 in the disc plane; it must sit
  // strictly inside the domain.
  const double r2 = r * r;
  for (int k = 0; k < 3; ++k) {
    const double reach = k == axis ? r2 : r + r2;
    if (!(x0[k] - reach > grid.domain.lo[k] && x0[k] + reach < grid.domain.hi[k])) {
      throw std::invalid_argument(
          "vr probe neighborhood R_r is not strictly inside the domain "
          "(reach " + format_double(reach) + " from center on axis " +
          std::to_string(k + 1) + ")");
    }
  }
  if (r2 < grid.max_spacing()) {
    throw std::invalid_argument(
        "vr resolvability rule violated: r^2 = " + format_double(r2) +
        " < max cell spacing " + format_double(grid.max_spacing()) +
        " (the 2r^2 band through the disc must span at least 2 cells)");
  }

  VrProbe probe;
  probe.x0 = x0;
  probe.axis = axis;
  probe.r = r;
  probe.nodal.resize(grid.interior_dofs);
  for (std::size_t dof = 0; dof < grid.interior_dofs; ++dof) {
    probe.nodal[dof] = analytic_vr(mesh::node_coords(grid, dof), x0, r, axis);
  }
  return probe;
}

VrMetrics vr_metrics(const SparseMatrix& A, const SparseMatrix& L, double lambda,
                     VrProbe& probe) {
  VrMetrics m;
  m.l_norm = linalg::l_norm(L, probe.nodal);

  Vec b = linalg::spmv(L, probe.nodal);
  linalg::scale(b, lambda);
  linalg::axpy(-1.0, linalg::spmv(A, probe.nodal), b);

  const auto cg = linalg::cg_solve(L, b, linalg::kInnerSolveTol, 20000,
                                   linalg::Preconditioner::jacobi);
  m.residual_l_norm = linalg::l_norm(L, cg.x);
  m.cg_iterations = cg.iterations;

  probe.lambda = lambda;
  probe.l_norm = m.l_norm;
  probe.residual_l_norm = m.residual_l_norm;
  return m;
}

double vr_theoretical_bound(const coeff::DiagonalTensorField& field,
                            const Point& x0, int axis, double r,
                            int samples_per_axis) {
  require_3d(field.dim(), "vr_theoretical_bound");
  const double r2 = r * r;
  int n = std::max(9, samples_per_axis);
  if (n % 2 == 0) ++n;  // odd counts hit the disc plane and axial extremes

  int p, q;
  planar_axes(axis, p, q);
  Point lo = x0, hi = x0;
  lo[axis] -= r2;
  hi[axis] += r2;
  lo[p] -= r + r2;
  hi[p] += r + r2;
  lo[q] -= r + r2;
  hi[q] += r + r2;

  const double k0 = field.eval(x0)[axis];
  double sup_axis = 0.0;
  double sup_other[2] = {0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Point x{lo[0] + (hi[0] - lo[0]) * i / (n - 1),
                lo[1] + (hi[1] - lo[1]) * j / (n - 1),
                lo[2] + (hi[2] - lo[2]) * k / (n - 1)};
        if (distance_to_disc(x, x0, r, axis) > r2) continue;
        const auto kap = field.eval(x);
        sup_axis = std::max(sup_axis, std::abs(k0 - kap[axis]));
        sup_other[0] = std::max(sup_other[0], std::abs(k0 - kap[p]));
        sup_other[1] = std::max(sup_other[1], std::abs(k0 - kap[q]));
      }
    }
  }
  const double collar = 2.0 * kPi * r * (2.0 + r);
  return (2.0 * kPi + collar) * sup_axis * sup_axis +
         collar * (sup_other[0] * sup_other[0] + sup_other[1] * sup_other[1]);
}

double vr_cylinder_axial_gradient_integral(double r, int planar_samples,
                                           int axial_samples) {
  // Midpoints in the disc plane over [-r,r]^2 and along the axis over
  // (0, r^2), doubled by symmetry. The FD step never straddles the disc
  // plane or the collar edge.
  const double r2 = r * r;
  const double hp = 2.0 * r / planar_samples;
  const double ha = r2 / axial_samples;
  const double delta = ha / 8.0;
  const Point x0{0.0, 0.0, 0.0};

  double integral = 0.0;
  for (int i = 0; i < planar_samples; ++i) {
    const double y = -r + (i + 0.5) * hp;
    for (int j = 0; j < planar_samples; ++j) {
      const double z = -r + (j + 0.5) * hp;
      if (y * y + z * z > r2) continue;
      double col = 0.0;
      for (int k = 0; k < axial_samples; ++k) {
        const double a = (k + 0.5) * ha;
        const double vp = analytic_vr({a + delta, y, z}, x0, r, 0);
        const double vm = analytic_vr({a - delta, y, z}, x0, r, 0);
        const double g = (vp - vm) / (2.0 * delta);
        col += g * g * ha;
      }
      integral += 2.0 * col * hp * hp;  // both sides of the disc plane
    }
  }
  return integral;
}

VrVolumes vr_volumes_mc(double r, std::uint64_t samples, std::uint64_t seed) {
  const double r2 = r * r;
  const double reach = r + r2;
  const double box_volume = (2.0 * r2) * (2.0 * reach) * (2.0 * reach);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(-r2, r2);
  std::uniform_real_distribution<double> up(-reach, reach);

  const Point x0{0.0, 0.0, 0.0};
  std::uint64_t in_cylinder = 0, in_collar = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const double a = ua(rng);
    const double y = up(rng);
    const double z = up(rng);
    const double rho = std::hypot(y, z);
    if (rho <= r) {
      ++in_cylinder;  // |a| <= r^2 by construction of the box
    } else if (distance_to_disc({a, y, z}, x0, r, 0) <= r2) {
      ++in_collar;
    }
  }
  VrVolumes v;
  v.samples = samples;
  v.cylinder = box_volume * static_cast<double>(in_cylinder) / static_cast<double>(samples);
  v.collar = box_volume * static_cast<double>(in_collar) / static_cast<double>(samples);
  return v;
}

double vr_max_gradient_fd(double r, std::uint64_t samples, std::uint64_t seed) {
  const double r2 = r * r;
  const double reach = r + 2.0 * r2;  // pad past R_r; the profile is global
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(-2.0 * r2, 2.0 * r2);
  std::uniform_real_distribution<double> up(-reach, reach);
  const double delta = r2 * 1e-3;
  const Point x0{0.0, 0.0, 0.0};

  double worst = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Point x{ua(rng), up(rng), up(rng)};
    for (int k = 0; k < 3; ++k) {
      Point xp = x, xm = x;
      xp[k] += delta;
      xm[k] -= delta;
      const double g =
          std::abs(analytic_vr(xp, x0, r, 0) - analytic_vr(xm, x0, r, 0)) /
          (2.0 * delta);
      worst = std::max(worst, g);
    }
  }
  return worst;
}

BoxModeProbe build_box_mode(const StructuredGrid& grid, const Point& x0,
                            double k1, double k2, double lambda, double scale,
                            int n) {
  require_3d(grid.dim(), "build_box_mode");
  if (!(k1 < lambda && lambda < k2)) {
    throw std::invalid_argument(
        "box mode requires k1 < lambda < k2, got k1 = " + format_double(k1) +
        ", lambda = " + format_double(lambda) + ", k2 = " + format_double(k2));
  }
  if (!(scale > 0.0 && scale < 1.0)) {
    throw std::invalid_argument("box mode scale must lie in (0,1)");
  }
  if (n < 1) throw std::invalid_argument("box mode integer must be >= 1");

  BoxModeProbe probe;
  probe.x0 = x0;
  probe.k1 = k1;
  probe.k2 = k2;
  probe.lambda = lambda;
  probe.scale = scale;
  probe.n = n;
  probe.edges = {scale * std::sqrt(lambda - k1), scale * std::sqrt(k2 - lambda), scale};

  for (int k = 0; k < 3; ++k) {
    if (!(x0[k] >= grid.domain.lo[k] && x0[k] + probe.edges[k] <= grid.domain.hi[k])) {
      throw std::invalid_argument("box S_h is not inside the domain on axis " +
                                  std::to_string(k + 1));
    }
    if (probe.edges[k] < 2.0 * grid.spacing[k]) {
      throw std::invalid_argument(
          "box S_h edge on axis " + std::to_string(k + 1) + " (" +
          format_double(probe.edges[k]) + ") spans fewer than 2 grid cells");
    }
  }

  probe.nodal.resize(grid.interior_dofs);
  for (std::size_t dof = 0; dof < grid.interior_dofs; ++dof) {
    const Point x = mesh::node_coords(grid, dof);
    const double t1 = x[0] - x0[0];
    const double t2 = x[1] - x0[1];
    const double t3 = x[2] - x0[2];
    const bool inside = t1 > 0.0 && t1 < probe.edges[0] && t2 > 0.0 &&
                        t2 < probe.edges[1] && t3 > 0.0 && t3 < probe.edges[2];
    probe.nodal[dof] = inside ? std::sin(n * kPi * t1 / probe.edges[0]) *
                                    std::sin(n * kPi * t2 / probe.edges[1])
                              : 0.0;
  }
  return probe;
}

BoxModeMetrics box_mode_metrics(const SparseMatrix& A, const SparseMatrix& L,
                                double lambda, BoxModeProbe& probe) {
  BoxModeMetrics m;
  m.probe_l_norm = linalg::l_norm(L, probe.nodal);
  m.rayleigh = linalg::l_inner(A, probe.nodal, probe.nodal) /
               linalg::l_inner(L, probe.nodal, probe.nodal);
  Vec b = linalg::spmv(L, probe.nodal);
  linalg::scale(b, lambda);
  linalg::axpy(-1.0, linalg::spmv(A, probe.nodal), b);
  linalg::scale(b, 1.0 / m.probe_l_norm);  // residual per unit L-norm
  const auto cg = linalg::cg_solve(L, b, linalg::kInnerSolveTol, 20000,
                                   linalg::Preconditioner::jacobi);
  m.residual_l_norm = linalg::l_norm(L, cg.x);
  m.cg_iterations = cg.iterations;

  probe.rayleigh = m.rayleigh;
  probe.residual_l_norm = m.residual_l_norm;
  return m;
}

void write_probe_csv(const StructuredGrid& grid, const Vec& nodal,
                     const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const int d = grid.dim();
  const char* headers[] = {"x", "y", "z"};
  for (int k = 0; k < d; ++k) f << headers[k] << ',';
  f << "value\n";
  for (std::size_t dof = 0; dof < grid.interior_dofs; ++dof) {
    const Point x = mesh::node_coords(grid, dof);
    for (int k = 0; k < d; ++k) f << format_double(x[k]) << ',';
    f << format_double(nodal[dof]) << '\n';
  }
}

}  // namespace ellspec::probes
