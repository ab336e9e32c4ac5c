#include "ellspec/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "ellspec/errors.hpp"

namespace ellspec::linalg {

namespace {

void require_length(const Vec& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(v.size()) + " vs " +
                                std::to_string(n) + ")");
  }
}

// Shortest round-trip decimal form; locale-independent.
std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

double* SparseMatrix::find(std::size_t row, std::uint32_t col) {
  const auto* c = static_cast<const SparseMatrix*>(this);
  return const_cast<double*>(c->find(row, col));
}

const double* SparseMatrix::find(std::size_t row, std::uint32_t col) const {
  const auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[row]);
  const auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[row + 1]);
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return nullptr;
  return &values[static_cast<std::size_t>(it - col_idx.begin())];
}

double dot(const Vec& a, const Vec& b) {
  require_length(b, a.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vec& x, Vec& y) {
  require_length(y, x.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(Vec& x, double alpha) {
  for (double& v : x) v *= alpha;
}

void spmv_into(const SparseMatrix& M, const Vec& x, Vec& y) {
  require_length(x, M.n, "spmv");
  y.assign(M.n, 0.0);
  for (std::size_t i = 0; i < M.n; ++i) {
    double s = 0.0;
    for (std::size_t p = M.row_ptr[i]; p < M.row_ptr[i + 1]; ++p) {
      s += M.values[p] * x[M.col_idx[p]];
    }
    y[i] = s;
  }
}

Vec spmv(const SparseMatrix& M, const Vec& x) {
  Vec y;
  spmv_into(M, x, y);
  return y;
}

double l_inner(const SparseMatrix& L, const Vec& u, const Vec& v) {
  require_length(u, L.n, "l_inner");
  require_length(v, L.n, "l_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < L.n; ++i) {
    double row = 0.0;
    for (std::size_t p = L.row_ptr[i]; p < L.row_ptr[i + 1]; ++p) {
      row += L.values[p] * v[L.col_idx[p]];
    }
    s += u[i] * row;
  }
  return s;
}

double l_norm(const SparseMatrix& L, const Vec& u) {
  const double q = l_inner(L, u, u);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

CgResult cg_solve(const SparseMatrix& M, const Vec& b, double rel_tol,
                  int max_iter, Preconditioner precond) {
  require_length(b, M.n, "cg_solve");
  const std::size_t n = M.n;

  Vec inv_diag;
  if (precond == Preconditioner::jacobi) {
    inv_diag.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* d = M.find(i, static_cast<std::uint32_t>(i));
      if (d == nullptr || !(*d > 0.0)) {
        throw SolverError("jacobi preconditioner requires positive diagonal");
      }
      inv_diag[i] = 1.0 / *d;
    }
  }
  auto apply_precond = [&](const Vec& r) {
    if (precond == Preconditioner::none) return r;
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    return z;
  };

  CgResult out;
  out.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return out;

  Vec r = b;
  Vec z = apply_precond(r);
  Vec p = z;
  double rz = dot(r, z);
  Vec Mp(n);

  for (int it = 1; it <= max_iter; ++it) {
    spmv_into(M, p, Mp);
    const double pMp = dot(p, Mp);
    if (!(pMp > 0.0)) {
      throw SolverError("cg: matrix is not positive definite (curvature " +
                        format_double(pMp) + " at iteration " +
                        std::to_string(it) + ")");
    }
    const double alpha = rz / pMp;
    axpy(alpha, p, out.x);
    axpy(-alpha, Mp, r);
    const double res = norm2(r) / bnorm;
    out.iterations = it;
    out.achieved_residual = res;
    if (res <= rel_tol) return out;
    z = apply_precond(r);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverError("cg: no convergence after " + std::to_string(max_iter) +
                        " iterations (achieved relative residual " +
                        format_double(out.achieved_residual) + ")",
                    out.achieved_residual);
}

DenseMatrix cholesky_dense(const DenseMatrix& M) {
  if (M.rows != M.cols) throw std::invalid_argument("cholesky: matrix not square");
  const std::size_t n = M.rows;
  DenseMatrix R(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = M(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= R(k, j) * R(k, j);
    if (!(d > 0.0)) {
      throw SolverError("cholesky: matrix not positive definite (pivot " +
                        format_double(d) + " at index " + std::to_string(j) + ")");
    }
    const double rjj = std::sqrt(d);
    R(j, j) = rjj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = M(j, i);
      for (std::size_t k = 0; k < j; ++k) s -= R(k, j) * R(k, i);
      R(j, i) = s / rjj;
    }
  }
  return R;
}

void solve_lower_from_upper_transpose(const DenseMatrix& R, DenseMatrix& B) {
  // R^T is lower triangular with (R^T)(i,k) = R(k,i).
  const std::size_t n = R.rows;
  for (std::size_t c = 0; c < B.cols; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = B(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= R(k, i) * B(k, c);
      B(i, c) = s / R(i, i);
    }
  }
}

void solve_right_upper(const DenseMatrix& R, DenseMatrix& B) {
  // Row-wise: for each row x of B solve x R = b, left to right.
  const std::size_t n = R.rows;
  for (std::size_t r = 0; r < B.rows; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = B(r, j);
      for (std::size_t k = 0; k < j; ++k) s -= B(r, k) * R(k, j);
      B(r, j) = s / R(j, j);
    }
  }
}

void solve_upper(const DenseMatrix& R, Vec& b) {
  const std::size_t n = R.rows;
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= R(ii, k) * b[k];
    b[ii] = s / R(ii, ii);
  }
}

DenseMatrix densify(const SparseMatrix& M) {
  DenseMatrix D(M.n, M.n);
  for (std::size_t i = 0; i < M.n; ++i) {
    for (std::size_t p = M.row_ptr[i]; p < M.row_ptr[i + 1]; ++p) {
      D(i, M.col_idx[p]) = M.values[p];
    }
  }
  return D;
}

void write_coordinate_text(const SparseMatrix& M, std::ostream& out) {
  for (std::size_t i = 0; i < M.n; ++i) {
    for (std::size_t p = M.row_ptr[i]; p < M.row_ptr[i + 1]; ++p) {
      out << (i + 1) << ' ' << (M.col_idx[p] + 1) << ' '
          << format_double(M.values[p]) << '\n';
    }
  }
}

void write_coordinate_file(const SparseMatrix& M, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_coordinate_text(M, f);
}

}  // namespace ellspec::linalg
