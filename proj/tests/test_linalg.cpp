#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ellspec/errors.hpp"
#include "ellspec/linalg.hpp"

using namespace ellspec;
using linalg::DenseMatrix;
using linalg::Preconditioner;
using linalg::SparseMatrix;
using linalg::Vec;

namespace {

SparseMatrix from_dense(const DenseMatrix& D) {
  SparseMatrix M;
  M.n = D.rows;
  M.row_ptr.assign(M.n + 1, 0);
  for (std::size_t i = 0; i < M.n; ++i) {
    for (std::size_t j = 0; j < M.n; ++j) {
      if (D(i, j) != 0.0) {
        M.col_idx.push_back(static_cast<std::uint32_t>(j));
        M.values.push_back(D(i, j));
      }
    }
    M.row_ptr[i + 1] = M.values.size();
  }
  return M;
}

SparseMatrix identity(std::size_t n) {
  DenseMatrix D(n, n);
  for (std::size_t i = 0; i < n; ++i) D(i, i) = 1.0;
  return from_dense(D);
}

SparseMatrix tridiag(std::size_t n, double lo, double mid, double hi) {
  DenseMatrix D(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    D(i, i) = mid;
    if (i > 0) D(i, i - 1) = lo;
    if (i + 1 < n) D(i, i + 1) = hi;
  }
  return from_dense(D);
}

Vec random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("spmv basics") {
  const auto I = identity(5);
  const Vec x = random_vec(5, 7);
  CHECK(linalg::spmv(I, x) == x);

  const auto L = tridiag(3, -1, 2, -1);
  const Vec y = linalg::spmv(L, {1, 1, 1});
  CHECK(y == Vec{1, 0, 1});

  SparseMatrix zero;
  zero.n = 4;
  zero.row_ptr.assign(5, 0);
  CHECK(linalg::spmv(zero, {1, 2, 3, 4}) == Vec{0, 0, 0, 0});

  CHECK_THROWS_AS((void)linalg::spmv(I, {1, 2}), std::invalid_argument);
}

TEST_CASE("spmv linearity") {
  const auto L = tridiag(20, -1, 2.5, -1);
  const Vec x = random_vec(20, 1), y = random_vec(20, 2);
  const double a = 0.37, b = -2.25;
  Vec axby(20);
  for (std::size_t i = 0; i < 20; ++i) axby[i] = a * x[i] + b * y[i];
  const Vec lhs = linalg::spmv(L, axby);
  const Vec lx = linalg::spmv(L, x), ly = linalg::spmv(L, y);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(lhs[i] == doctest::Approx(a * lx[i] + b * ly[i]).epsilon(1e-13));
  }
}

TEST_CASE("cg on the identity converges in one iteration") {
  const auto I = identity(6);
  const Vec b = random_vec(6, 3);
  const auto r = linalg::cg_solve(I, b, 1e-12, 10, Preconditioner::none);
  CHECK(r.iterations <= 1);
  for (std::size_t i = 0; i < 6; ++i) CHECK(r.x[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("cg inverts the order-3 Laplacian example") {
  const auto L = tridiag(3, -1, 2, -1);
  const auto r = linalg::cg_solve(L, {1, 0, 1}, 1e-12, 10, Preconditioner::none);
  for (double xi : r.x) CHECK(xi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jacobi preconditioning solves a diagonal system immediately") {
  DenseMatrix D(3, 3);
  D(0, 0) = 1;
  D(1, 1) = 10;
  D(2, 2) = 100;
  const auto M = from_dense(D);
  const auto r = linalg::cg_solve(M, {1, 1, 1}, 1e-14, 5, Preconditioner::jacobi);
  CHECK(r.iterations <= 2);
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(0.1));
  CHECK(r.x[2] == doctest::Approx(0.01));
}

TEST_CASE("cg error decreases monotonically with tighter tolerances") {
  // The M-norm error of CG iterates is non-increasing; observed here through
  // runs stopped at successively tighter residual targets on a known solution.
  const std::size_t n = 40;
  const auto M = tridiag(n, -1, 2, -1);
  const Vec xstar = random_vec(n, 11);
  const Vec b = linalg::spmv(M, xstar);
  double prev_err = -1.0;
  int prev_iters = 0;
  for (double tol : {1e-2, 1e-5, 1e-8, 1e-11}) {
    const auto r = linalg::cg_solve(M, b, tol, 1000, Preconditioner::none);
    Vec e = r.x;
    linalg::axpy(-1.0, xstar, e);
    const double err = std::sqrt(linalg::l_inner(M, e, e));
    if (prev_err >= 0.0) {
      CHECK(err <= prev_err + 1e-15);
      CHECK(r.iterations >= prev_iters);
    }
    prev_err = err;
    prev_iters = r.iterations;
  }
}

TEST_CASE("cg reports non-convergence with the achieved residual") {
  const auto M = tridiag(50, -1, 2, -1);
  const Vec b = random_vec(50, 5);
  try {
    (void)linalg::cg_solve(M, b, 1e-14, 2, Preconditioner::none);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.achieved_residual > 0.0);
    CHECK(std::string(e.what()).find("no convergence") != std::string::npos);
  }
}

TEST_CASE("cg detects indefiniteness via negative curvature") {
  DenseMatrix D(2, 2);
  D(0, 0) = 1;
  D(0, 1) = 2;
  D(1, 0) = 2;
  D(1, 1) = 1;
  const auto M = from_dense(D);
  CHECK_THROWS_WITH_AS((void)linalg::cg_solve(M, {1, -1}, 1e-10, 10, Preconditioner::none),
                       doctest::Contains("not positive definite"), SolverError);
}

TEST_CASE("l_inner and l_norm") {
  const auto I = identity(4);
  const Vec u = random_vec(4, 8), v = random_vec(4, 9);
  CHECK(linalg::l_inner(I, u, v) == doctest::Approx(linalg::dot(u, v)).epsilon(1e-15));
  CHECK(linalg::l_norm(I, Vec{0, 0, 0, 0}) == 0.0);

  const auto L = tridiag(4, -1, 2, -1);
  CHECK(linalg::l_inner(L, u, v) == doctest::Approx(linalg::l_inner(L, v, u)).epsilon(1e-14));
  CHECK(linalg::l_norm(L, u) > 0.0);
  CHECK_THROWS_AS((void)linalg::l_inner(I, {1.0, 2.0}, v), std::invalid_argument);
}

TEST_CASE("dense cholesky examples") {
  DenseMatrix I(2, 2);
  I(0, 0) = I(1, 1) = 1.0;
  auto R = linalg::cholesky_dense(I);
  CHECK(R(0, 0) == 1.0);
  CHECK(R(1, 1) == 1.0);
  CHECK(R(0, 1) == 0.0);

  DenseMatrix M(2, 2);
  M(0, 0) = 4;
  M(0, 1) = 2;
  M(1, 0) = 2;
  M(1, 1) = 5;
  R = linalg::cholesky_dense(M);
  CHECK(R(0, 0) == doctest::Approx(2.0));
  CHECK(R(0, 1) == doctest::Approx(1.0));
  CHECK(R(1, 0) == 0.0);
  CHECK(R(1, 1) == doctest::Approx(2.0));

  DenseMatrix nine(1, 1);
  nine(0, 0) = 9.0;
  CHECK(linalg::cholesky_dense(nine)(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("cholesky reproduces a random SPD matrix to 1e-12") {
  const std::size_t n = 25;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix B(n, n);
  for (auto& x : B.data) x = u(rng);
  DenseMatrix M(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = i == j ? n : 0.0;
      for (std::size_t k = 0; k < n; ++k) s += B(k, i) * B(k, j);
      M(i, j) = s;
    }
  }
  const auto R = linalg::cholesky_dense(M);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += R(k, i) * R(k, j);
      num += (s - M(i, j)) * (s - M(i, j));
      den += M(i, j) * M(i, j);
    }
  }
  CHECK(std::sqrt(num / den) <= 1e-12);
}

TEST_CASE("cholesky rejects indefinite input") {
  DenseMatrix M(2, 2);
  M(0, 0) = 1;
  M(0, 1) = 3;
  M(1, 0) = 3;
  M(1, 1) = 1;
  CHECK_THROWS_WITH_AS((void)linalg::cholesky_dense(M),
                       doctest::Contains("not positive definite"), SolverError);
}

TEST_CASE("identical inputs give bitwise-identical cg outputs") {
  const auto M = tridiag(30, -1, 2.1, -1);
  const Vec b = random_vec(30, 21);
  const auto r1 = linalg::cg_solve(M, b, 1e-10, 200, Preconditioner::jacobi);
  const auto r2 = linalg::cg_solve(M, b, 1e-10, 200, Preconditioner::jacobi);
  CHECK(r1.x == r2.x);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.achieved_residual == r2.achieved_residual);
}

TEST_CASE("coordinate export: 1-based symmetric triples") {
  const auto L = tridiag(2, -1, 2, -1);
  std::ostringstream out;
  linalg::write_coordinate_text(L, out);
  CHECK(out.str() == "1 1 2\n1 2 -1\n2 1 -1\n2 2 2\n");
}
