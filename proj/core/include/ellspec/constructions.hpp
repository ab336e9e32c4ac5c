#pragma once

#include <cstdint>
#include <string>

#include "ellspec/assembly.hpp"
#include "ellspec/coefficients.hpp"
#include "ellspec/linalg.hpp"
#include "ellspec/mesh.hpp"

namespace ellspec::probes {

using linalg::SparseMatrix;
using linalg::Vec;
using mesh::Point;
using mesh::StructuredGrid;

// The v_r family: equal to 1 on a disc D_r normal to `axis`, decaying
// linearly over a collar of thickness r^2, zero outside the neighborhood
// R_r = { d(x, D_r) <= r^2 }. An approximate eigenfunction of the
// Laplacian-preconditioned operator at lambda = kappa_axis(x0).

/// Euclidean distance from x to the closed disc of radius r centered at x0
/// in the plane normal to `axis` (0-based). Three-dimensional construction;
/// with axial offset a and in-plane distance rho: a if rho <= r, else
/// hypot(a, rho - r).
double distance_to_disc(const Point& x, const Point& x0, double r, int axis);

/// The analytic profile clamp(1 - d(x, D_r)/r^2, [0,1]).
double analytic_vr(const Point& x, const Point& x0, double r, int axis);

struct VrProbe {
  Point x0{};
  int axis = 0;  // 0-based
  double r = 0.0;
  double lambda = 0.0;  // kappa_axis(x0), set by the caller or vr study
  Vec nodal;
  // metrics, filled by vr_metrics / vr_theoretical_bound
  double l_norm = 0.0;
  double residual_l_norm = 0.0;
  double theoretical_bound = 0.0;
};

/// Nodal interpolation of v_r on the grid's interior nodes. Requires d = 3,
/// R_r strictly inside the domain, and the resolvability rule
/// r^2 >= max cell spacing (the 2 r^2-thick band through the disc spans at
/// least two cells; a thinner collar degenerates to a nodal spike).
VrProbe build_vr(const StructuredGrid& grid, const Point& x0, int axis, double r);

struct VrMetrics {
  double l_norm = 0.0;
  double residual_l_norm = 0.0;
  int cg_iterations = 0;
};

/// |v|_L and the residual |u|_L with L u = (lambda L - A) v solved by CG at
/// rel_tol 1e-10. Both are recorded into the probe as well.
VrMetrics vr_metrics(const SparseMatrix& A, const SparseMatrix& L, double lambda,
                     VrProbe& probe);

/// The Lemma bound on the squared residual:
///   (2pi + 2pi r(2+r)) sup_{R_r} |k_axis(x0)-k_axis(x)|^2
///   + 2pi r(2+r) sum_{i != axis} sup_{R_r} |k_axis(x0)-k_i(x)|^2,
/// sups estimated on an inclusive lattice over R_r (odd point counts, so the
/// axial extremes and the disc plane are sampled exactly).
double vr_theoretical_bound(const coeff::DiagonalTensorField& field,
                            const Point& x0, int axis, double r,
                            int samples_per_axis = 41);

// Geometry oracles for the analytic v_r (no grid involved).

/// Midpoint quadrature of (dv_r/dx_1)^2 over the cylinder C_r using finite
/// differences of the analytic profile; equals 2*pi exactly in the continuum.
double vr_cylinder_axial_gradient_integral(double r, int planar_samples = 1024,
                                           int axial_samples = 16);

struct VrVolumes {
  double cylinder = 0.0;  // exact value 2 pi r^4
  double collar = 0.0;    // R_r minus C_r; bounded by 2 pi r^5 (2+r)
  std::uint64_t samples = 0;
};

/// Monte Carlo volumes of C_r and R_r \ C_r with a fixed seed.
VrVolumes vr_volumes_mc(double r, std::uint64_t samples, std::uint64_t seed);

/// Largest |dv_r/dx_i| seen by central finite differences at random sample
/// points; never exceeds 1/r^2 (the profile is 1/r^2-Lipschitz).
double vr_max_gradient_fd(double r, std::uint64_t samples, std::uint64_t seed);

// The box modes of the two-coefficient construction: a tensor-product sine on
// the scaled box S_h, an eigenfunction candidate for any lambda strictly
// between two constant coefficient values k1 < k2.

struct BoxModeProbe {
  Point x0{};         // corner of S_h
  double k1 = 0.0;
  double k2 = 0.0;
  double lambda = 0.0;
  double scale = 0.0;  // the h parameter of S_h
  int n = 1;           // mode integer
  Point edges{};       // (scale*sqrt(lambda-k1), scale*sqrt(k2-lambda), scale)
  Vec nodal;
  // metrics
  double rayleigh = 0.0;
  double residual_l_norm = 0.0;
};

/// Nodal interpolation of
///   phi(x) = sin(n pi (x1-x1_0)/e1) * sin(n pi (x2-x2_0)/e2)
/// inside the open box S_h = (x0, x0 + edges), zero outside (constant in x3
/// inside S_h, cut off at the x3 faces). Requires k1 < lambda < k2, S_h
/// inside the domain, and every edge spanning at least 2 grid cells.
BoxModeProbe build_box_mode(const StructuredGrid& grid, const Point& x0,
                            double k1, double k2, double lambda, double scale,
                            int n);

struct BoxModeMetrics {
  double rayleigh = 0.0;
  double residual_l_norm = 0.0;
  double probe_l_norm = 0.0;
  int cg_iterations = 0;
};

/// rayleigh = (v^T A v)/(v^T L v) and the residual of the L-normalized probe:
/// |u|_L with L u = (lambda L - A) v / |v|_L. The probe's L-norm diverges
/// under grid refinement (the x3 cutoff layers), so the residual is reported
/// per unit L-norm to stay comparable across grids.
BoxModeMetrics box_mode_metrics(const SparseMatrix& A, const SparseMatrix& L,
                                double lambda, BoxModeProbe& probe);

/// Point-value CSV (x[,y[,z]],value) over interior nodes, for visualization.
void write_probe_csv(const StructuredGrid& grid, const Vec& nodal,
                     const std::string& path);

}  // namespace ellspec::probes
