// Command-line front end: assembles the discrete pencils, runs the spectrum /
// probe experiments described by a flat key-value config, and emits JSON/CSV.
//
// Exit codes: 0 success, 1 config error, 2 numerical failure, 3 a checked
// property (inclusion, fill, monotonicity assert, oracle mismatch) failed.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ellspec/analysis.hpp"
#include "ellspec/assembly.hpp"
#include "ellspec/config.hpp"
#include "ellspec/constructions.hpp"
#include "ellspec/eig.hpp"
#include "ellspec/errors.hpp"
#include "ellspec/linalg.hpp"

namespace {

namespace fs = std::filesystem;
using ellspec::ConfigError;
using ellspec::SolverError;
using ellspec::config::KeyValueConfig;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitCheckFailed = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

void log_run(const char* cmd, const KeyValueConfig& cfg, std::uint64_t seed) {
  std::printf("ellspec %s: config_hash=%016" PRIx64 " seed=%" PRIu64
              " tol_incl=%g cg_tol=%g\n",
              cmd, cfg.text_hash(), seed, ellspec::analysis::kInclusionTol,
              ellspec::linalg::kInnerSolveTol);
}

ellspec::mesh::Point parse_point(KeyValueConfig& cfg, const std::string& key, int dim) {
  const std::vector<double> v = cfg.get_doubles(key);
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError("config key '" + key + "' must list one coordinate per axis");
  }
  ellspec::mesh::Point p{};
  for (int k = 0; k < dim; ++k) p[k] = v[static_cast<std::size_t>(k)];
  return p;
}

int cmd_spectrum(const CommonArgs& args) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
  const auto domain = ellspec::config::parse_domain(cfg);
  const auto grid = ellspec::config::parse_grid(cfg, domain);
  const auto field = ellspec::config::parse_field(cfg, domain);
  const auto options = ellspec::config::parse_solver(cfg, args.seed);
  cfg.ensure_all_consumed();
  log_run("spectrum", cfg, options.seed);

  const auto report = ellspec::analysis::run_spectrum(grid, field, options);
  ellspec::analysis::atomic_write_file(
      (fs::path(args.out_dir) / "report.json").string(),
      ellspec::analysis::report_to_json(report, cfg.text_hash()));
  ellspec::analysis::atomic_write_file(
      (fs::path(args.out_dir) / "eigenvalues.csv").string(),
      ellspec::analysis::eigenvalues_to_csv(report.eigen));

  if (options.method == ellspec::analysis::SpectrumOptions::Method::lobpcg &&
      !report.eigen.converged) {
    std::fprintf(stderr, "solver error: lobpcg did not converge in %d iterations\n",
                 report.eigen.iterations);
    return kExitNumeric;
  }
  std::printf("eigenvalues=%zu hull=[%.12g, %.12g] inclusion=%s max_gap=%.6g\n",
              report.eigen.eigenvalues.size(), report.hull.lo, report.hull.hi,
              report.inclusion_ok ? "ok" : "VIOLATED", report.max_gap);
  return report.inclusion_ok ? kExitOk : kExitCheckFailed;
}

int cmd_vr_study(const CommonArgs& args) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
  const auto domain = ellspec::config::parse_domain(cfg);
  const auto field = ellspec::config::parse_field(cfg, domain);
  const auto x0 = parse_point(cfg, "vr.x0", domain.dim);
  const int axis = static_cast<int>(cfg.get_int("vr.axis")) - 1;
  const std::vector<double> r_list = cfg.get_doubles("vr.r_list");
  const std::vector<int> cells_list = cfg.get_ints("vr.cells_list");
  const bool assert_residual = cfg.get_bool_or("assert.residual_decreasing", false);
  const bool assert_lnorm = cfg.get_bool_or("assert.lnorm_converging", false);
  const std::string probe_csv = cfg.get_string_or("vr.probe_csv", "");
  cfg.ensure_all_consumed();
  log_run("vr-study", cfg, 0);

  const auto rows =
      ellspec::analysis::vr_convergence_study(field, x0, axis, r_list, cells_list);
  ellspec::analysis::atomic_write_file(
      (fs::path(args.out_dir) / "vr_study.csv").string(),
      ellspec::analysis::vr_study_to_csv(rows));

  if (!probe_csv.empty()) {
    const auto grid = ellspec::mesh::build_grid(
        domain, {cells_list.back(), cells_list.back(), cells_list.back()});
    const auto probe = ellspec::probes::build_vr(grid, x0, axis, r_list.back());
    ellspec::probes::write_probe_csv(grid, probe.nodal,
                                     (fs::path(args.out_dir) / probe_csv).string());
  }

  bool ok = true;
  if (assert_residual) {
    // within each cells group, residual strictly decreasing in r-list order
    for (std::size_t c = 0; c < cells_list.size(); ++c) {
      for (std::size_t i = 1; i < r_list.size(); ++i) {
        const auto& prev = rows[c * r_list.size() + i - 1];
        const auto& cur = rows[c * r_list.size() + i];
        if (!(cur.residual < prev.residual)) {
          std::fprintf(stderr,
                       "assert residual_decreasing failed at cells=%d: "
                       "r=%g residual %.6g !< r=%g residual %.6g\n",
                       cur.cells, cur.r, cur.residual, prev.r, prev.residual);
          ok = false;
        }
      }
    }
  }
  if (assert_lnorm && cells_list.size() >= 3) {
    // fixed r, refining grid: successive l_norm differences shrink
    for (std::size_t i = 0; i < r_list.size(); ++i) {
      for (std::size_t c = 2; c < cells_list.size(); ++c) {
        const double d1 = std::abs(rows[(c - 1) * r_list.size() + i].l_norm -
                                   rows[(c - 2) * r_list.size() + i].l_norm);
        const double d2 = std::abs(rows[c * r_list.size() + i].l_norm -
                                   rows[(c - 1) * r_list.size() + i].l_norm);
        if (!(d2 < d1)) {
          std::fprintf(stderr,
                       "assert lnorm_converging failed at r=%g: diff %.6g !< %.6g\n",
                       r_list[i], d2, d1);
          ok = false;
        }
      }
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_box_mode(const CommonArgs& args) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
  const auto domain = ellspec::config::parse_domain(cfg);
  const auto field = ellspec::config::parse_field(cfg, domain);
  const auto x0 = parse_point(cfg, "boxmode.x0", domain.dim);
  const double k1 = cfg.get_double("boxmode.k1");
  const double k2 = cfg.get_double("boxmode.k2");
  const double lambda = cfg.get_double("boxmode.lambda");
  const double scale = cfg.get_double("boxmode.h");
  const int n = static_cast<int>(cfg.get_int_or("boxmode.n", 1));
  const std::vector<int> cells_list = cfg.get_ints("boxmode.cells_list");
  const bool assert_residual = cfg.get_bool_or("assert.residual_decreasing", false);
  const bool assert_rayleigh = cfg.get_bool_or("assert.rayleigh_converging", false);

  // The constancy subdomain S; defaults to the whole domain.
  ellspec::mesh::Point s_lo = domain.lo, s_hi = domain.hi;
  if (cfg.has("boxmode.s_lo") || cfg.has("boxmode.s_hi")) {
    s_lo = parse_point(cfg, "boxmode.s_lo", domain.dim);
    s_hi = parse_point(cfg, "boxmode.s_hi", domain.dim);
  }
  cfg.ensure_all_consumed();
  log_run("box-mode", cfg, 0);

  if (!(k1 < lambda && lambda < k2)) {
    throw ConfigError("boxmode.lambda must lie strictly between boxmode.k1 and boxmode.k2");
  }
  const ellspec::mesh::Point edges{scale * std::sqrt(lambda - k1),
                                   scale * std::sqrt(k2 - lambda), scale};
  for (int k = 0; k < 3; ++k) {
    if (!(x0[k] >= s_lo[k] && x0[k] + edges[k] <= s_hi[k])) {
      throw ConfigError("box S_h is not inside the constancy subdomain on axis " +
                        std::to_string(k + 1));
    }
  }
  {
    // the field must actually take the (k1, k2, .) values on S_h
    ellspec::mesh::Point mid{};
    for (int k = 0; k < 3; ++k) mid[k] = x0[k] + 0.5 * edges[k];
    const auto kv = field.eval(mid);
    if (std::abs(kv[0] - k1) > 1e-12 || std::abs(kv[1] - k2) > 1e-12) {
      throw ConfigError("field does not equal (boxmode.k1, boxmode.k2, ...) on S_h");
    }
  }

  const auto rows = ellspec::analysis::box_mode_study(field, x0, k1, k2, lambda,
                                                      scale, n, cells_list);
  ellspec::analysis::atomic_write_file(
      (fs::path(args.out_dir) / "box_mode.csv").string(),
      ellspec::analysis::box_mode_study_to_csv(rows));

  bool ok = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (assert_residual && !(rows[i].residual < rows[i - 1].residual)) {
      std::fprintf(stderr,
                   "assert residual_decreasing failed: cells=%d residual %.6g !< "
                   "cells=%d residual %.6g\n",
                   rows[i].cells, rows[i].residual, rows[i - 1].cells,
                   rows[i - 1].residual);
      ok = false;
    }
    if (assert_rayleigh && !(rows[i].rayleigh_error < rows[i - 1].rayleigh_error)) {
      std::fprintf(stderr, "assert rayleigh_converging failed at cells=%d\n",
                   rows[i].cells);
      ok = false;
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_fill_check(const CommonArgs& args) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
  const auto domain = ellspec::config::parse_domain(cfg);
  const auto grid = ellspec::config::parse_grid(cfg, domain);
  const auto field = ellspec::config::parse_field(cfg, domain);
  const auto options = ellspec::config::parse_solver(cfg, args.seed);
  const std::vector<double> interval = cfg.get_doubles("fill.interval");
  const double delta = cfg.get_double("fill.delta");
  if (interval.size() != 2 || !(interval[0] < interval[1])) {
    throw ConfigError("fill.interval must be 'a,b' with a < b");
  }
  cfg.ensure_all_consumed();
  log_run("fill-check", cfg, options.seed);

  const auto report = ellspec::analysis::run_spectrum(grid, field, options);
  const auto check = ellspec::analysis::interval_fill_check(
      report.eigen.eigenvalues, interval[0], interval[1], delta);

  ellspec::analysis::atomic_write_file(
      (fs::path(args.out_dir) / "fill.json").string(),
      ellspec::analysis::fill_check_to_json(check, interval[0], interval[1], delta,
                                            report.eigen.eigenvalues.size(),
                                            cfg.text_hash()));
  ellspec::analysis::atomic_write_file(
      (fs::path(args.out_dir) / "eigenvalues.csv").string(),
      ellspec::analysis::eigenvalues_to_csv(report.eigen));

  std::printf("fill [%g, %g] delta=%g: worst_gap=%.6g -> %s\n", interval[0],
              interval[1], delta, check.worst_gap, check.ok ? "ok" : "FAILED");
  return check.ok ? kExitOk : kExitCheckFailed;
}

int cmd_oracle_check(const CommonArgs& args) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
  const auto domain = ellspec::config::parse_domain(cfg);
  const auto grid = ellspec::config::parse_grid(cfg, domain);
  const auto field = ellspec::config::parse_field(cfg, domain);
  const double tol = cfg.get_double_or("oracle.tol", 1e-10);
  const bool corrupt = cfg.get_bool_or("oracle.corrupt", false);
  cfg.ensure_all_consumed();
  log_run("oracle-check", cfg, 0);

  const auto* constant = std::get_if<ellspec::coeff::DiagonalTensorField::Constant>(
      &field.kind());
  if (constant == nullptr) {
    throw ConfigError("oracle-check requires field.kind = constant");
  }

  const auto quad = ellspec::assembly::QuadratureRule::make(
      ellspec::assembly::QuadratureRule::Kind::gauss2, grid.dim());
  auto A = ellspec::assembly::assemble_stiffness(grid, field, quad);
  const auto L = ellspec::assembly::assemble_laplacian(grid);
  if (corrupt) {
    // negative-control hook: a symmetric diagonal perturbation the oracle
    // comparison must catch
    A.values[0] += 1e-6 * (1.0 + std::abs(A.values[0]));
  }

  const auto dense = ellspec::eig::dense_generalized_eig(A, L, false);
  const auto oracle = ellspec::eig::constant_pencil_eigenvalues(grid, constant->values);

  double worst = 0.0;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    worst = std::max(worst, std::abs(dense.eigenvalues[i] - oracle[i]) /
                                std::abs(oracle[i]));
  }
  std::printf("oracle-check: %zu eigenvalues, max relative mismatch %.3e (tol %.3e)\n",
              oracle.size(), worst, tol);
  return worst <= tol ? kExitOk : kExitCheckFailed;
}

int dispatch(int (*fn)(const CommonArgs&), const CommonArgs& args) {
  try {
    return fn(args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ellspec: generalized spectra of Laplacian-preconditioned "
               "diffusion operators on box domains"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const CommonArgs&);
  };
  const Sub subs[] = {
      {"spectrum", "assemble a pencil, compute its spectrum and hull report",
       cmd_spectrum},
      {"vr-study", "disc-probe convergence study (norms, residuals, bounds)",
       cmd_vr_study},
      {"box-mode", "box-mode metrics over a grid refinement ladder", cmd_box_mode},
      {"fill-check", "interval fill diagnostic on the computed spectrum",
       cmd_fill_check},
      {"oracle-check", "dense solver vs the constant-coefficient closed form",
       cmd_oracle_check},
  };

  std::vector<std::pair<CommonArgs, int (*)(const CommonArgs&)>> runs(std::size(subs));
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* sub = app.add_subcommand(subs[i].name, subs[i].help);
    auto& args = runs[i].first;
    runs[i].second = subs[i].fn;
    sub->add_option("--config", args.config_path, "experiment config file")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory (default .)");
    sub->add_option("--seed", args.seed, "override solver.seed");
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < std::size(subs); ++i) {
    if (app.get_subcommands().front()->get_name() == subs[i].name) {
      return dispatch(runs[i].second, runs[i].first);
    }
  }
  return kExitConfig;
}
