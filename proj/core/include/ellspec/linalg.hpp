#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ellspec::linalg {

using Vec = std::vector<double>;

/// Symmetric sparse matrix in CSR layout. Column indices are strictly
/// increasing within each row; every stored (i,j,v) has its (j,i,v) partner
/// stored too.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;   // size n+1
  std::vector<std::uint32_t> col_idx; // size nnz
  std::vector<double> values;         // size nnz

  std::size_t nnz() const { return values.size(); }

  /// Pointer to the stored value at (row, col), or nullptr if the slot is
  /// not in the sparsity pattern. Binary search within the row.
  double* find(std::size_t row, std::uint32_t col);
  const double* find(std::size_t row, std::uint32_t col) const;
};

/// Row-major dense matrix (also used for eigenvector blocks, so not
/// necessarily square).
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  bool empty() const { return data.empty(); }
};

// ---- vector kernels --------------------------------------------------------

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
void axpy(double alpha, const Vec& x, Vec& y);  // y += alpha*x
void scale(Vec& x, double alpha);

// ---- sparse kernels --------------------------------------------------------

/// y = M x with per-row accumulation in ascending column order.
Vec spmv(const SparseMatrix& M, const Vec& x);
void spmv_into(const SparseMatrix& M, const Vec& x, Vec& y);

/// u^T L v; both the L-inner product of the artifact and a plain bilinear form.
double l_inner(const SparseMatrix& L, const Vec& u, const Vec& v);

/// sqrt(u^T L u); the energy norm induced by L.
double l_norm(const SparseMatrix& L, const Vec& u);

enum class Preconditioner { none, jacobi };

struct CgResult {
  Vec x;
  int iterations = 0;
  double achieved_residual = 0.0;  // relative, |Mx-b|/|b|
};

/// Conjugate gradients for SPD M. Throws SolverError on negative curvature
/// (matrix not positive definite) or when max_iter is reached without
/// |Mx-b| <= rel_tol*|b| (the error carries the achieved residual).
CgResult cg_solve(const SparseMatrix& M, const Vec& b, double rel_tol,
                  int max_iter, Preconditioner precond);

/// Default relative tolerance for inner solves with the Laplacian.
inline constexpr double kInnerSolveTol = 1e-10;

// ---- dense kernels ---------------------------------------------------------

/// Upper-triangular R with M = R^T R; throws SolverError("... not positive
/// definite") on a non-positive pivot.
DenseMatrix cholesky_dense(const DenseMatrix& M);

/// Solves R^T X = B in place (R upper triangular), i.e. forward substitution
/// down the columns of B.
void solve_lower_from_upper_transpose(const DenseMatrix& R, DenseMatrix& B);

/// Solves X R = B in place (R upper triangular).
void solve_right_upper(const DenseMatrix& R, DenseMatrix& B);

/// Solves R x = b in place (back substitution).
void solve_upper(const DenseMatrix& R, Vec& b);

DenseMatrix densify(const SparseMatrix& M);

// ---- export ----------------------------------------------------------------

/// Plain-text coordinate format: one "i j value" triple per line, 1-based,
/// symmetric entries both stored.
void write_coordinate_text(const SparseMatrix& M, std::ostream& out);
void write_coordinate_file(const SparseMatrix& M, const std::string& path);

}  // namespace ellspec::linalg
