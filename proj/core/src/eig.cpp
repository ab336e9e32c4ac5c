#include "ellspec/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ellspec/errors.hpp"

namespace ellspec::eig {

namespace {

using linalg::Preconditioner;

// ---- Householder reduction to tridiagonal form (tred2) ---------------------
//
// On exit d holds the diagonal and e[1..n-1] the sub-diagonal of the reduced
// matrix. With accumulate=true, `a` is replaced by the orthogonal transform Q
// with Q^T A Q tridiagonal, so QL rotations applied to Q's columns yield the
// eigenvectors of A.
void householder_tridiagonalize(DenseMatrix& a, Vec& d, Vec& e, bool accumulate) {
  const std::size_t n = a.rows;
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  if (n == 0) return;

  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          if (accumulate) a(j, i) = a(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  if (accumulate) d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (accumulate) {
      if (d[i] != 0.0) {
        for (std::size_t j = 0; j < i; ++j) {
          double g = 0.0;
          for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
          for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
        }
      }
      d[i] = a(i, i);
      a(i, i) = 1.0;
      for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
    } else {
      d[i] = a(i, i);
    }
  }
}

// ---- implicit-shift QL on a symmetric tridiagonal (tql2) -------------------
//
// Eigenvalues land in d; rotations are applied to z's columns when z is
// non-null. Budget: 30 sweeps per eigenvalue, 30n in total per the solver
// contract.
void ql_implicit_shift(Vec& d, Vec& e, DenseMatrix* z) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 30) {
          throw SolverError("generalized eigensolver: QL iteration exceeded the 30n rotation budget");
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        std::size_t i = m;  // survives the loop for the r==0 restart test
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z != nullptr) {
            for (std::size_t k = 0; k < z->rows; ++k) {
              f = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
              (*z)(k, i) = c * (*z)(k, i) - s * f;
            }
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

void sort_pairs_ascending(Vec& values, DenseMatrix* vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Vec sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = values[order[i]];
  values = std::move(sorted);
  if (vectors != nullptr && !vectors->empty()) {
    DenseMatrix v(vectors->rows, vectors->cols);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < vectors->rows; ++i) v(i, j) = (*vectors)(i, order[j]);
    }
    *vectors = std::move(v);
  }
}

Vec column(const DenseMatrix& m, std::size_t j) {
  Vec v(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) v[i] = m(i, j);
  return v;
}

std::vector<double> pair_residuals(const SparseMatrix& A, const SparseMatrix& L,
                                   const std::vector<double>& values,
                                   const DenseMatrix& vectors) {
  std::vector<double> res(values.size(), 0.0);
  Vec x(A.n), Ax, Lx;
  for (std::size_t j = 0; j < values.size(); ++j) {
    for (std::size_t i = 0; i < A.n; ++i) x[i] = vectors(i, j);
    Ax = linalg::spmv(A, x);
    Lx = linalg::spmv(L, x);
    linalg::axpy(-values[j], Lx, Ax);
    const double denom = linalg::norm2(Lx);
    res[j] = denom > 0.0 ? linalg::norm2(Ax) / denom : linalg::norm2(Ax);
  }
  return res;
}

}  // namespace

SymmetricEigen dense_symmetric_eig(DenseMatrix a, bool want_vectors) {
  if (a.rows != a.cols) throw std::invalid_argument("dense_symmetric_eig: matrix not square");
  SymmetricEigen out;
  Vec e;
  householder_tridiagonalize(a, out.values, e, want_vectors);
  ql_implicit_shift(out.values, e, want_vectors ? &a : nullptr);
  if (want_vectors) {
    sort_pairs_ascending(out.values, &a);
    out.vectors = std::move(a);
  } else {
    sort_pairs_ascending(out.values, nullptr);
  }
  return out;
}

EigenResult dense_generalized_eig(const SparseMatrix& A, const SparseMatrix& L,
                                  bool want_vectors, std::size_t dense_cap) {
  if (A.n != L.n) throw std::invalid_argument("pencil matrices differ in order");
  if (A.n > dense_cap) {
    throw std::invalid_argument("dense solver limited to order " +
                                std::to_string(dense_cap) + ", got " +
                                std::to_string(A.n));
  }
  const std::size_t n = A.n;

  // L = R^T R, C = R^-T A R^-1 (two triangular solves), symmetrized.
  const DenseMatrix R = linalg::cholesky_dense(linalg::densify(L));
  DenseMatrix C = linalg::densify(A);
  linalg::solve_lower_from_upper_transpose(R, C);
  linalg::solve_right_upper(R, C);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (C(i, j) + C(j, i));
      C(i, j) = C(j, i) = v;
    }
  }

  const SymmetricEigen se = dense_symmetric_eig(std::move(C), want_vectors);

  EigenResult out;
  out.method = "dense";
  out.eigenvalues = se.values;
  if (want_vectors) {
    // x = R^-1 y; already L-orthonormal up to rounding, renormalized anyway.
    DenseMatrix X(n, n);
    Vec col(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) col[i] = se.vectors(i, j);
      linalg::solve_upper(R, col);
      for (std::size_t i = 0; i < n; ++i) X(i, j) = col[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) col[i] = X(i, j);
      const double nrm = linalg::l_norm(L, col);
      if (nrm > 0.0) {
        for (std::size_t i = 0; i < n; ++i) X(i, j) /= nrm;
      }
    }
    out.vectors = std::move(X);
    out.residuals = pair_residuals(A, L, out.eigenvalues, out.vectors);
  }
  return out;
}

double rayleigh_quotient(const SparseMatrix& A, const SparseMatrix& L, const Vec& v) {
  if (linalg::norm2(v) == 0.0) {
    throw std::invalid_argument("rayleigh_quotient: zero vector");
  }
  return linalg::l_inner(A, v, v) / linalg::l_inner(L, v, v);
}

// ---- LOBPCG ----------------------------------------------------------------

namespace {

// Column with its cached A- and L-images, so L-inner products and Rayleigh-Ritz
// grams never re-apply the operators.
struct Triplet {
  Vec v, av, lv;
};

Triplet make_triplet(const SparseMatrix& A, const SparseMatrix& L, Vec v) {
  Triplet t;
  t.av = linalg::spmv(A, v);
  t.lv = linalg::spmv(L, v);
  t.v = std::move(v);
  return t;
}

// Modified Gram-Schmidt in the L-inner product against `basis`, two passes,
// then normalization; near-dependent columns report false and are dropped.
bool l_orthonormalize_into(std::vector<Triplet>& basis, Triplet t) {
  const double orig = std::sqrt(std::max(0.0, linalg::dot(t.v, t.lv)));
  if (!(orig > 0.0)) return false;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Triplet& u : basis) {
      const double c = linalg::dot(u.v, t.lv);
      if (c == 0.0) continue;
      linalg::axpy(-c, u.v, t.v);
      linalg::axpy(-c, u.av, t.av);
      linalg::axpy(-c, u.lv, t.lv);
    }
  }
  const double nrm = std::sqrt(std::max(0.0, linalg::dot(t.v, t.lv)));
  if (!(nrm > 1e-10 * orig) || nrm == 0.0) return false;
  const double inv = 1.0 / nrm;
  linalg::scale(t.v, inv);
  linalg::scale(t.av, inv);
  linalg::scale(t.lv, inv);
  basis.push_back(std::move(t));
  return true;
}

}  // namespace

EigenResult lobpcg(const SparseMatrix& A, const SparseMatrix& L,
                   const LobpcgOptions& opts) {
  if (A.n != L.n) throw std::invalid_argument("pencil matrices differ in order");
  const std::size_t n = A.n;
  const std::size_t m = opts.block;
  if (m < 1) throw std::invalid_argument("lobpcg: block must be >= 1");
  if (m > n) {
    throw std::invalid_argument("lobpcg: block " + std::to_string(m) +
                                " exceeds problem order " + std::to_string(n));
  }

  const double sign = opts.which == Which::largest ? -1.0 : 1.0;
  auto apply_op = [&](const Vec& v) {
    Vec av = linalg::spmv(A, v);
    if (sign < 0.0) linalg::scale(av, -1.0);
    return av;
  };
  auto make_trip = [&](Vec v) {
    Triplet t;
    t.av = apply_op(v);
    t.lv = linalg::spmv(L, v);
    t.v = std::move(v);
    return t;
  };

  // Seeded random initial block, L-orthonormalized.
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Triplet> X;
  while (X.size() < m) {
    Vec v(n);
    for (double& x : v) x = unif(rng);
    l_orthonormalize_into(X, make_trip(std::move(v)));
  }

  std::vector<double> theta(m, 0.0);
  std::vector<Triplet> P;
  EigenResult out;
  out.method = "lobpcg";
  out.seed = opts.seed;
  out.converged = false;

  auto rayleigh_ritz = [&](const std::vector<Triplet>& S) {
    const std::size_t q = S.size();
    DenseMatrix G(q, q);
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = i; j < q; ++j) {
        G(i, j) = G(j, i) = linalg::dot(S[i].v, S[j].av);
      }
    }
    return dense_symmetric_eig(std::move(G), true);
  };

  // Ritz step on the initial block.
  {
    const SymmetricEigen rr = rayleigh_ritz(X);
    std::vector<Triplet> Xn(m);
    for (std::size_t k = 0; k < m; ++k) {
      Xn[k].v.assign(n, 0.0);
      Xn[k].av.assign(n, 0.0);
      Xn[k].lv.assign(n, 0.0);
      for (std::size_t q = 0; q < m; ++q) {
        const double c = rr.vectors(q, k);
        linalg::axpy(c, X[q].v, Xn[k].v);
        linalg::axpy(c, X[q].av, Xn[k].av);
        linalg::axpy(c, X[q].lv, Xn[k].lv);
      }
      theta[k] = rr.values[k];
    }
    X = std::move(Xn);
  }

  std::vector<double> resid(m, 0.0);
  for (int it = 1; it <= opts.max_iter; ++it) {
    out.iterations = it;

    std::vector<Vec> residual_vecs(m);
    bool all_converged = true;
    for (std::size_t k = 0; k < m; ++k) {
      Vec r = X[k].av;
      linalg::axpy(-theta[k], X[k].lv, r);
      const double denom = linalg::norm2(X[k].lv);
      resid[k] = denom > 0.0 ? linalg::norm2(r) / denom : 0.0;
      all_converged = all_converged && resid[k] <= opts.tol;
      residual_vecs[k] = std::move(r);
    }
    if (all_converged) {
      out.converged = true;
      break;
    }

    // Preconditioned residuals: approximate L-inverse via loose CG.
    std::vector<Triplet> S = X;
    std::size_t w_kept = 0;
    for (std::size_t k = 0; k < m; ++k) {
      Vec w;
      try {
        w = linalg::cg_solve(L, residual_vecs[k], opts.inner_tol, 2000,
                             Preconditioner::jacobi)
                .x;
      } catch (const SolverError&) {
        w = residual_vecs[k];  // fall back to the raw residual direction
      }
      if (l_orthonormalize_into(S, make_trip(std::move(w)))) ++w_kept;
    }
    for (const Triplet& p : P) {
      l_orthonormalize_into(S, p);
    }
    if (w_kept == 0) break;  // stagnated: residuals lie in span(X)

    const SymmetricEigen rr = rayleigh_ritz(S);
    const std::size_t q = S.size();

    std::vector<Triplet> Xn(m), Pn;
    for (std::size_t k = 0; k < m; ++k) {
      Xn[k].v.assign(n, 0.0);
      Xn[k].av.assign(n, 0.0);
      Xn[k].lv.assign(n, 0.0);
      Triplet pk;
      pk.v.assign(n, 0.0);
      pk.av.assign(n, 0.0);
      pk.lv.assign(n, 0.0);
      for (std::size_t s = 0; s < q; ++s) {
        const double c = rr.vectors(s, k);
        if (c == 0.0) continue;
        linalg::axpy(c, S[s].v, Xn[k].v);
        linalg::axpy(c, S[s].av, Xn[k].av);
        linalg::axpy(c, S[s].lv, Xn[k].lv);
        if (s >= m) {  // the W/P part: next search direction
          linalg::axpy(c, S[s].v, pk.v);
          linalg::axpy(c, S[s].av, pk.av);
          linalg::axpy(c, S[s].lv, pk.lv);
        }
      }
      theta[k] = rr.values[k];
      Pn.push_back(std::move(pk));
    }
    X = std::move(Xn);
    // Keep P L-orthonormal among itself for the next round's basis build.
    std::vector<Triplet> Portho;
    for (Triplet& pk : Pn) l_orthonormalize_into(Portho, std::move(pk));
    P = std::move(Portho);
  }

  // Assemble the result in ascending original-eigenvalue order.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (sign < 0.0) std::reverse(order.begin(), order.end());

  out.eigenvalues.resize(m);
  out.vectors = DenseMatrix(n, m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = sign * theta[src];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = X[src].v[i];
  }
  out.residuals = pair_residuals(A, L, out.eigenvalues, out.vectors);
  return out;
}

// ---- tensor-product oracle ---------------------------------------------------

double one_dim_stiffness_eigenvalue(int n, double h, int j) {
  return (2.0 / h) * (1.0 - std::cos(j * std::numbers::pi / n));
}

double one_dim_mass_eigenvalue(int n, double h, int j) {
  return (h / 3.0) * (2.0 + std::cos(j * std::numbers::pi / n));
}

std::vector<double> constant_pencil_eigenvalues(
    const mesh::StructuredGrid& grid,
    const std::array<double, mesh::kMaxDim>& kvals) {
  const int d = grid.dim();
  std::array<std::vector<double>, mesh::kMaxDim> s, mm;
  for (int k = 0; k < d; ++k) {
    const int n = grid.cells[k];
    for (int j = 1; j < n; ++j) {
      s[k].push_back(one_dim_stiffness_eigenvalue(n, grid.spacing[k], j));
      mm[k].push_back(one_dim_mass_eigenvalue(n, grid.spacing[k], j));
    }
  }
  std::vector<double> out;
  out.reserve(grid.interior_dofs);
  mesh::MultiIndex j{0, 0, 0};
  for (std::size_t flat = 0; flat < grid.interior_dofs; ++flat) {
    std::size_t rest = flat;
    for (int k = 0; k < d; ++k) {
      j[k] = static_cast<int>(rest % s[k].size());
      rest /= s[k].size();
    }
    double num = 0.0, den = 0.0;
    for (int k = 0; k < d; ++k) {
      double term = s[k][static_cast<std::size_t>(j[k])];
      for (int l = 0; l < d; ++l) {
        if (l != k) term *= mm[l][static_cast<std::size_t>(j[l])];
      }
      num += kvals[k] * term;
      den += term;
    }
    out.push_back(num / den);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ellspec::eig
