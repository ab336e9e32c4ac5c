#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ellspec/linalg.hpp"
#include "ellspec/mesh.hpp"

namespace ellspec::eig {

using linalg::DenseMatrix;
using linalg::SparseMatrix;
using linalg::Vec;

inline constexpr std::size_t kDefaultDenseCap = 4000;

/// Result of a generalized symmetric solve A x = lambda L x.
struct EigenResult {
  std::vector<double> eigenvalues;  // ascending
  DenseMatrix vectors;              // n x m, L-orthonormal columns; may be empty
  std::vector<double> residuals;    // |Ax - lambda Lx|_2 / |Lx|_2, per pair
  std::string method;               // "dense" or "lobpcg"
  std::uint64_t seed = 0;           // lobpcg initial-block seed; 0 for dense
  bool converged = true;
  int iterations = 0;

  bool has_vectors() const { return !vectors.empty(); }
};

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // orthonormal columns; empty unless requested
};

/// All eigenpairs of a dense symmetric matrix: Householder tridiagonalization
/// followed by implicit-shift QL. Throws SolverError past the rotation budget.
SymmetricEigen dense_symmetric_eig(DenseMatrix a, bool want_vectors);

/// Full spectrum of the pencil (A, L): densify L, factor L = R^T R, form
/// C = R^-T A R^-1, tridiagonalize, QL-iterate; vectors are back-transformed
/// and L-orthonormalized. Requires order <= dense_cap.
EigenResult dense_generalized_eig(const SparseMatrix& A, const SparseMatrix& L,
                                  bool want_vectors,
                                  std::size_t dense_cap = kDefaultDenseCap);

enum class Which { smallest, largest };

struct LobpcgOptions {
  std::size_t block = 1;
  Which which = Which::smallest;
  double tol = 1e-8;        // per-pair relative residual
  int max_iter = 200;
  std::uint64_t seed = 1;   // recorded in the result
  double inner_tol = 1e-6;  // CG tolerance for the approximate L-inverse
};

/// Locally optimal block PCG for `block` extreme eigenpairs of (A, L), with
/// L-inner-product orthogonalization and an approximate L-inverse (loose CG)
/// as the preconditioner. Non-convergence returns the best iterate with
/// converged = false rather than throwing.
EigenResult lobpcg(const SparseMatrix& A, const SparseMatrix& L,
                   const LobpcgOptions& opts);

/// (v^T A v) / (v^T L v); rejects the zero vector.
double rayleigh_quotient(const SparseMatrix& A, const SparseMatrix& L, const Vec& v);

/// 1D Q1 stiffness/mass eigenvalues of mode j (1-based) on a uniform grid of
/// n cells with spacing h: the closed forms behind the tensor-product oracle.
double one_dim_stiffness_eigenvalue(int n, double h, int j);
double one_dim_mass_eigenvalue(int n, double h, int j);

/// Closed-form generalized eigenvalues of the pencil assembled with constant
/// K on a tensor-product grid, ascending. Independent of the dense solver
/// path; the trust anchor for everything else.
std::vector<double> constant_pencil_eigenvalues(
    const mesh::StructuredGrid& grid,
    const std::array<double, mesh::kMaxDim>& kvals);

}  // namespace ellspec::eig
