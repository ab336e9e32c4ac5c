#include "ellspec/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ellspec/assembly.hpp"
#include "ellspec/linalg.hpp"

namespace ellspec::analysis {

namespace {

using json = nlohmann::ordered_json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json field_descriptor(const DiagonalTensorField& field) {
  json j;
  j["kind"] = field.kind_name();
  const int d = field.dim();
  auto arr = [&](const auto& a) {
    json out = json::array();
    for (int k = 0; k < d; ++k) out.push_back(a[k]);
    return out;
  };
  if (const auto* c = std::get_if<DiagonalTensorField::Constant>(&field.kind())) {
    j["values"] = arr(c->values);
  } else if (const auto* a = std::get_if<DiagonalTensorField::AxisAffine>(&field.kind())) {
    j["offsets"] = arr(a->offsets);
    j["slopes"] = arr(a->slopes);
    json coords = json::array();
    for (int k = 0; k < d; ++k) coords.push_back(a->coords[k] + 1);
    j["coords"] = coords;
  } else if (const auto* p = std::get_if<DiagonalTensorField::PiecewiseConstant>(&field.kind())) {
    j["background"] = arr(p->background);
    json boxes = json::array();
    for (const auto& b : p->boxes) {
      json bj;
      bj["lo"] = arr(b.lo);
      bj["hi"] = arr(b.hi);
      bj["values"] = arr(b.values);
      boxes.push_back(bj);
    }
    j["boxes"] = boxes;
  } else {
    const auto& s = std::get<DiagonalTensorField::SmoothRadial>(field.kind());
    j["base"] = s.base;
    j["amplitude"] = s.amplitude;
    j["width"] = s.width;
    j["center"] = arr(s.center);
  }
  return j;
}

}  // namespace

std::string field_descriptor_json(const DiagonalTensorField& field) {
  return field_descriptor(field).dump();
}

SpectrumReport run_spectrum(const StructuredGrid& grid,
                            const DiagonalTensorField& field,
                            const SpectrumOptions& options) {
  const auto t_total = std::chrono::steady_clock::now();
  SpectrumReport report;
  report.domain = grid.domain;
  report.cells = grid.cells;
  report.interior_dofs = grid.interior_dofs;
  report.field_kind = field.kind_name();
  report.field_descriptor = field_descriptor_json(field);
  report.options = options;

  auto t0 = std::chrono::steady_clock::now();
  const auto quad = assembly::QuadratureRule::make(
      assembly::QuadratureRule::Kind::gauss2, grid.dim());
  const auto A = assembly::assemble_stiffness(grid, field, quad);
  const auto L = assembly::assemble_laplacian(grid);
  report.timings.assemble_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  report.hull = coeff::estimate_hull(field, grid, options.hull_oversample);
  report.timings.hull_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  if (options.method == SpectrumOptions::Method::dense) {
    report.eigen = eig::dense_generalized_eig(A, L, options.want_vectors,
                                              options.dense_cap);
  } else {
    eig::LobpcgOptions lo;
    lo.block = options.block;
    lo.which = options.which;
    lo.tol = options.tol;
    lo.max_iter = options.max_iter;
    lo.seed = options.seed;
    report.eigen = eig::lobpcg(A, L, lo);
  }
  report.timings.solve_seconds = seconds_since(t0);

  report.inclusion_ok = true;
  for (double v : report.eigen.eigenvalues) {
    report.inclusion_ok = report.inclusion_ok &&
                          v >= report.hull.lo - report.inclusion_tol &&
                          v <= report.hull.hi + report.inclusion_tol;
  }
  if (report.hull.hi > report.hull.lo) {
    report.max_gap =
        interval_fill_check(report.eigen.eigenvalues, report.hull.lo,
                            report.hull.hi, 0.0)
            .worst_gap;
  }
  report.timings.total_seconds = seconds_since(t_total);
  return report;
}

FillCheck interval_fill_check(const std::vector<double>& eigenvalues, double a,
                              double b, double delta) {
  if (!(a < b)) throw std::invalid_argument("fill check requires a < b");
  std::vector<double> pts;
  pts.push_back(a);
  for (double v : eigenvalues) {
    if (v >= a && v <= b) pts.push_back(v);
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  FillCheck out;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    out.worst_gap = std::max(out.worst_gap, pts[i] - pts[i - 1]);
  }
  out.ok = out.worst_gap <= delta;
  return out;
}

std::vector<VrStudyRow> vr_convergence_study(const DiagonalTensorField& field,
                                             const Point& x0, int axis,
                                             const std::vector<double>& r_list,
                                             const std::vector<int>& cells_list) {
  std::vector<VrStudyRow> rows;
  const double lambda = field.eval(x0)[axis];
  for (int cells : cells_list) {
    const auto grid = mesh::build_grid(field.domain(), {cells, cells, cells});
    const auto quad = assembly::QuadratureRule::make(
        assembly::QuadratureRule::Kind::gauss2, grid.dim());
    const auto A = assembly::assemble_stiffness(grid, field, quad);
    const auto L = assembly::assemble_laplacian(grid);
    for (double r : r_list) {
      auto probe = probes::build_vr(grid, x0, axis, r);
      const auto metrics = probes::vr_metrics(A, L, lambda, probe);
      VrStudyRow row;
      row.r = r;
      row.cells = cells;
      row.l_norm = metrics.l_norm;
      row.residual = metrics.residual_l_norm;
      row.bound = probes::vr_theoretical_bound(field, x0, axis, r);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<BoxModeStudyRow> box_mode_study(const DiagonalTensorField& field,
                                            const Point& x0, double k1, double k2,
                                            double lambda, double scale, int n,
                                            const std::vector<int>& cells_list) {
  std::vector<BoxModeStudyRow> rows;
  for (int cells : cells_list) {
    const auto grid = mesh::build_grid(field.domain(), {cells, cells, cells});
    const auto quad = assembly::QuadratureRule::make(
        assembly::QuadratureRule::Kind::gauss2, grid.dim());
    const auto A = assembly::assemble_stiffness(grid, field, quad);
    const auto L = assembly::assemble_laplacian(grid);
    auto probe = probes::build_box_mode(grid, x0, k1, k2, lambda, scale, n);
    const auto metrics = probes::box_mode_metrics(A, L, lambda, probe);
    BoxModeStudyRow row;
    row.cells = cells;
    row.rayleigh = metrics.rayleigh;
    row.rayleigh_error = std::abs(metrics.rayleigh - lambda);
    row.residual = metrics.residual_l_norm;
    row.probe_l_norm = metrics.probe_l_norm;
    rows.push_back(row);
  }
  return rows;
}

std::vector<LocalityRow> eigenvector_locality_probe(const eig::EigenResult& result,
                                                    const DiagonalTensorField& field,
                                                    const StructuredGrid& grid) {
  if (!result.has_vectors()) {
    throw std::invalid_argument("locality probe requires eigenvectors");
  }
  std::vector<LocalityRow> rows;
  for (std::size_t j = 0; j < result.eigenvalues.size(); ++j) {
    std::size_t argmax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < result.vectors.rows; ++i) {
      const double mag = std::abs(result.vectors(i, j));
      if (mag > best) {
        best = mag;
        argmax = i;
      }
    }
    LocalityRow row;
    row.lambda = result.eigenvalues[j];
    row.at = mesh::node_coords(grid, argmax);
    row.kappa = field.eval(row.at);
    rows.push_back(row);
  }
  return rows;
}

std::string report_to_json(const SpectrumReport& report, std::uint64_t config_hash) {
  json j;
  j["schema"] = "ellspec.spectrum-report.v1";
  char hash_buf[20];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(config_hash));
  j["config_hash"] = hash_buf;

  const int d = report.domain.dim;
  json dom;
  {
    json lo = json::array(), hi = json::array();
    for (int k = 0; k < d; ++k) {
      lo.push_back(report.domain.lo[k]);
      hi.push_back(report.domain.hi[k]);
    }
    dom["lo"] = lo;
    dom["hi"] = hi;
  }
  j["domain"] = dom;
  {
    json cells = json::array();
    for (int k = 0; k < d; ++k) cells.push_back(report.cells[k]);
    json g;
    g["cells"] = cells;
    g["interior_dofs"] = report.interior_dofs;
    j["grid"] = g;
  }
  j["field"] = json::parse(report.field_descriptor);
  {
    json s;
    s["method"] =
        report.options.method == SpectrumOptions::Method::dense ? "dense" : "lobpcg";
    s["want_vectors"] = report.options.want_vectors;
    s["dense_cap"] = report.options.dense_cap;
    if (report.options.method == SpectrumOptions::Method::lobpcg) {
      s["block"] = report.options.block;
      s["which"] = report.options.which == eig::Which::smallest ? "smallest" : "largest";
      s["tol"] = report.options.tol;
      s["max_iter"] = report.options.max_iter;
      s["seed"] = report.options.seed;
      s["converged"] = report.eigen.converged;
      s["iterations"] = report.eigen.iterations;
    }
    s["hull_oversample"] = report.options.hull_oversample;
    j["solver"] = s;
  }
  {
    json h;
    h["lo"] = report.hull.lo;
    h["hi"] = report.hull.hi;
    h["samples_used"] = report.hull.samples_used;
    j["hull"] = h;
  }
  {
    json inc;
    inc["ok"] = report.inclusion_ok;
    inc["tol"] = report.inclusion_tol;
    j["inclusion"] = inc;
  }
  j["max_gap"] = report.max_gap;
  j["eigenvalue_count"] = report.eigen.eigenvalues.size();
  j["eigenvalues"] = report.eigen.eigenvalues;
  j["residuals"] = report.eigen.residuals;
  {
    json t;
    t["assemble_seconds"] = report.timings.assemble_seconds;
    t["hull_seconds"] = report.timings.hull_seconds;
    t["solve_seconds"] = report.timings.solve_seconds;
    t["total_seconds"] = report.timings.total_seconds;
    j["timings"] = t;
  }
  return j.dump(2) + "\n";
}

std::string eigenvalues_to_csv(const eig::EigenResult& eigen) {
  std::string out = eigen.residuals.empty() ? "index,eigenvalue\n"
                                            : "index,eigenvalue,residual\n";
  for (std::size_t i = 0; i < eigen.eigenvalues.size(); ++i) {
    out += std::to_string(i) + ',' + format_double(eigen.eigenvalues[i]);
    if (!eigen.residuals.empty()) {
      out += ',' + format_double(eigen.residuals[i]);
    }
    out += '\n';
  }
  return out;
}

std::string vr_study_to_csv(const std::vector<VrStudyRow>& rows) {
  std::string out = "r,cells,l_norm,residual,bound\n";
  for (const auto& row : rows) {
    out += format_double(row.r) + ',' + std::to_string(row.cells) + ',' +
           format_double(row.l_norm) + ',' + format_double(row.residual) + ',' +
           format_double(row.bound) + '\n';
  }
  return out;
}

std::string box_mode_study_to_csv(const std::vector<BoxModeStudyRow>& rows) {
  std::string out = "cells,rayleigh,rayleigh_error,residual,probe_l_norm\n";
  for (const auto& row : rows) {
    out += std::to_string(row.cells) + ',' + format_double(row.rayleigh) + ',' +
           format_double(row.rayleigh_error) + ',' + format_double(row.residual) +
           ',' + format_double(row.probe_l_norm) + '\n';
  }
  return out;
}

std::string locality_to_csv(const std::vector<LocalityRow>& rows, int dim) {
  std::string out = "lambda";
  const char* coords[] = {"x", "y", "z"};
  for (int k = 0; k < dim; ++k) out += std::string(",") + coords[k];
  for (int k = 0; k < dim; ++k) out += ",kappa" + std::to_string(k + 1);
  out += '\n';
  for (const auto& row : rows) {
    out += format_double(row.lambda);
    for (int k = 0; k < dim; ++k) out += ',' + format_double(row.at[k]);
    for (int k = 0; k < dim; ++k) out += ',' + format_double(row.kappa[k]);
    out += '\n';
  }
  return out;
}

std::string fill_check_to_json(const FillCheck& check, double a, double b,
                               double delta, std::size_t eigenvalue_count,
                               std::uint64_t config_hash) {
  json j;
  j["schema"] = "ellspec.fill-check.v1";
  char hash_buf[20];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(config_hash));
  j["config_hash"] = hash_buf;
  j["interval"] = {a, b};
  j["delta"] = delta;
  j["eigenvalue_count"] = eigenvalue_count;
  j["ok"] = check.ok;
  j["worst_gap"] = check.worst_gap;
  return j.dump(2) + "\n";
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace ellspec::analysis
