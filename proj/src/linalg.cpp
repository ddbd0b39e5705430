#include "driftlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "driftlab/kernels.hpp"

namespace driftlab {

namespace {

void require_shapes(std::size_t a_rows, std::size_t a_cols, std::size_t b_rows) {
  if (a_rows != a_cols || a_rows != b_rows) throw AnalysisError("solve: shape mismatch");
}

// Gauss-Jordan to reduced form on [A | B]; A becomes I, B becomes X.
DenseMatrix<Rational> solve_exact(DenseMatrix<Rational> a, DenseMatrix<Rational> b) {
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a(pivot, col)) == 0) ++pivot;
    if (pivot == n) throw AnalysisError("internal error: singular system in exact solve");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      for (std::size_t c = 0; c < m; ++c) std::swap(b(pivot, c), b(col, c));
    }
    const Rational inv = 1 / a(col, col);
    for (std::size_t c = col; c < n; ++c) a(col, c) *= inv;
    for (std::size_t c = 0; c < m; ++c) b(col, c) *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a(r, col)) == 0) continue;
      const Rational factor = a(r, col);
      for (std::size_t c = col; c < n; ++c) {
        if (sgn(a(col, c)) != 0) a(r, c) -= factor * a(col, c);
      }
      for (std::size_t c = 0; c < m; ++c) {
        if (sgn(b(col, c)) != 0) b(r, c) -= factor * b(col, c);
      }
    }
  }
  return b;
}

struct LuFactors {
  DenseMatrix<double> lu;
  std::vector<std::size_t> perm;
};

LuFactors factor(DenseMatrix<double> a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  double scale = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(a(r, c)));
  const double tiny = scale * 1e-300 + 1e-300;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        pivot = r;
      }
    }
    if (best <= tiny) throw AnalysisError("internal error: singular system in float solve");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(perm[pivot], perm[col]);
    }
    const double diag = a(col, col);
    const auto pivot_tail = a.row(col).subspan(col + 1);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / diag;
      a(r, col) = factor;
      if (factor != 0.0) kernels::axpy(-factor, pivot_tail, a.row(r).subspan(col + 1));
    }
  }
  return {std::move(a), std::move(perm)};
}

// Solves LU x = P rhs in place for one right-hand side column.
std::vector<double> lu_solve(const LuFactors& f, const std::vector<double>& rhs) {
  const std::size_t n = f.lu.rows();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
  for (std::size_t i = 0; i < n; ++i) {
    x[i] -= kernels::dot(f.lu.row(i).first(i), std::span<const double>(x).first(i));
  }
  for (std::size_t i = n; i-- > 0;) {
    const auto tail = f.lu.row(i).subspan(i + 1);
    x[i] -= kernels::dot(tail, std::span<const double>(x).subspan(i + 1));
    x[i] /= f.lu(i, i);
  }
  return x;
}

DenseMatrix<double> solve_float(const DenseMatrix<double>& a, const DenseMatrix<double>& b) {
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  const LuFactors f = factor(a);
  DenseMatrix<double> x(n, m);
  std::vector<double> rhs(n), residual(n);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t r = 0; r < n; ++r) rhs[r] = b(r, c);
    std::vector<double> sol = lu_solve(f, rhs);

    auto compute_residual = [&] {
      double worst = 0.0;
      double norm = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        residual[r] = rhs[r] - kernels::dot(a.row(r), sol);
        worst = std::max(worst, std::abs(residual[r]));
        norm = std::max(norm, std::abs(rhs[r]));
      }
      double xnorm = 0.0;
      for (double v : sol) xnorm = std::max(xnorm, std::abs(v));
      return worst / std::max({norm, xnorm, 1.0});
    };

    compute_residual();
    const std::vector<double> correction = lu_solve(f, residual);
    for (std::size_t r = 0; r < n; ++r) sol[r] += correction[r];
    if (!(compute_residual() <= 1e-10)) throw AnalysisError("float solve: residual above 1e-10 after refinement");
    for (std::size_t r = 0; r < n; ++r) x(r, c) = sol[r];
  }
  return x;
}

}  // namespace

DenseMatrix<Rational> solve(DenseMatrix<Rational> a, DenseMatrix<Rational> b) {
  require_shapes(a.rows(), a.cols(), b.rows());
  return solve_exact(std::move(a), std::move(b));
}

DenseMatrix<double> solve(DenseMatrix<double> a, DenseMatrix<double> b) {
  require_shapes(a.rows(), a.cols(), b.rows());
  return solve_float(a, b);
}

}  // namespace driftlab
