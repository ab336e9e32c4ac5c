#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ellspec/coefficients.hpp"
#include "ellspec/constructions.hpp"
#include "ellspec/eig.hpp"
#include "ellspec/mesh.hpp"

namespace ellspec::analysis {

using coeff::DiagonalTensorField;
using coeff::HullEstimate;
using mesh::Point;
using mesh::StructuredGrid;

/// Every computed eigenvalue must lie in [hull.lo - tol, hull.hi + tol].
inline constexpr double kInclusionTol = 1e-9;

struct SpectrumOptions {
  enum class Method { dense, lobpcg };

  Method method = Method::dense;
  bool want_vectors = false;
  std::size_t dense_cap = eig::kDefaultDenseCap;
  // lobpcg knobs
  std::size_t block = 5;
  eig::Which which = eig::Which::smallest;
  double tol = 1e-8;
  int max_iter = 200;
  std::uint64_t seed = 1;
  // hull scan refinement factor
  int hull_oversample = 4;
};

struct Timings {
  double assemble_seconds = 0.0;
  double hull_seconds = 0.0;
  double solve_seconds = 0.0;
  double total_seconds = 0.0;
};

/// Predicted-versus-computed spectrum of one assembled pencil.
struct SpectrumReport {
  mesh::BoxDomain domain;
  mesh::MultiIndex cells{};
  std::size_t interior_dofs = 0;
  std::string field_kind;
  std::string field_descriptor;  // compact JSON of the field parameters
  SpectrumOptions options;
  HullEstimate hull;
  eig::EigenResult eigen;
  bool inclusion_ok = false;
  double inclusion_tol = kInclusionTol;
  double max_gap = 0.0;  // worst fill gap over the hull interval
  Timings timings;
};

/// Assembles A and L (gauss2), estimates the hull, solves the pencil with the
/// chosen method and fills the report.
SpectrumReport run_spectrum(const StructuredGrid& grid,
                            const DiagonalTensorField& field,
                            const SpectrumOptions& options);

struct FillCheck {
  bool ok = false;
  double worst_gap = 0.0;
};

/// ok iff every closed subinterval of [a,b] of width delta contains an
/// eigenvalue: consecutive gaps of the eigenvalues clipped to [a,b], with
/// virtual endpoints a and b included, all <= delta.
FillCheck interval_fill_check(const std::vector<double>& eigenvalues, double a,
                              double b, double delta);

struct VrStudyRow {
  double r = 0.0;
  int cells = 0;  // cubic cell count per axis
  double l_norm = 0.0;
  double residual = 0.0;
  double bound = 0.0;
};

/// One row per (cells, r) combination, cells outer (each grid assembled
/// once), r inner in the given order. lambda is kappa_axis at x0.
std::vector<VrStudyRow> vr_convergence_study(const DiagonalTensorField& field,
                                             const Point& x0, int axis,
                                             const std::vector<double>& r_list,
                                             const std::vector<int>& cells_list);

struct BoxModeStudyRow {
  int cells = 0;
  double rayleigh = 0.0;
  double rayleigh_error = 0.0;
  double residual = 0.0;
  double probe_l_norm = 0.0;
};

/// Box-mode metrics over a ladder of cubic grids with a constant field.
std::vector<BoxModeStudyRow> box_mode_study(const DiagonalTensorField& field,
                                            const Point& x0, double k1, double k2,
                                            double lambda, double scale, int n,
                                            const std::vector<int>& cells_list);

struct LocalityRow {
  double lambda = 0.0;
  Point at{};  // coordinates of the max-|component| node
  std::array<double, mesh::kMaxDim> kappa{};
};

/// For each eigenpair, the node where the L-normalized eigenvector peaks and
/// the coefficient values there. Exploratory; asserts nothing about pairing.
std::vector<LocalityRow> eigenvector_locality_probe(const eig::EigenResult& result,
                                                    const DiagonalTensorField& field,
                                                    const StructuredGrid& grid);

// ---- serialization ----------------------------------------------------------

/// Pretty JSON with stable key order; `timings` is a single top-level object
/// so determinism comparisons can drop it.
std::string report_to_json(const SpectrumReport& report,
                           std::uint64_t config_hash);

std::string eigenvalues_to_csv(const eig::EigenResult& eigen);
std::string vr_study_to_csv(const std::vector<VrStudyRow>& rows);
std::string box_mode_study_to_csv(const std::vector<BoxModeStudyRow>& rows);
std::string locality_to_csv(const std::vector<LocalityRow>& rows, int dim);
std::string fill_check_to_json(const FillCheck& check, double a, double b,
                               double delta, std::size_t eigenvalue_count,
                               std::uint64_t config_hash);

/// Compact JSON descriptor of a field (kind + parameters).
std::string field_descriptor_json(const DiagonalTensorField& field);

/// Writes content to path via a temp file and rename, so readers never see a
/// partial file.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace ellspec::analysis
