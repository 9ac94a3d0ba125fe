#include "icopt/dense.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace icopt {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("dense matrix dimensions must be positive");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix to_dense(const CsrMatrix& a) {
  DenseMatrix d(a.n, a.n);
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) d(i, a.col_idx[p]) = a.values[p];
  return d;
}

DenseMatrix to_dense(const LowerFactor& l) {
  DenseMatrix d(l.n(), l.n());
  const auto rp = l.row_ptr();
  const auto ci = l.col_idx();
  const auto v = l.values();
  for (std::size_t i = 0; i < l.n(); ++i)
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) d(i, ci[p]) = v[p];
  return d;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("dense product: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("dense difference: shapes differ");
  DenseMatrix c = a;
  auto cd = c.data();
  const auto bd = b.data();
  for (std::size_t k = 0; k < cd.size(); ++k) cd[k] -= bd[k];
  return c;
}

double frob_norm_sq(const DenseMatrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return s;
}

DenseMatrix dense_cholesky(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix must be square");
  const std::size_t n = a.rows();
  DenseMatrix c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = c.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const auto cj = c.row(j);
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= ci[k] * cj[k];
      if (j == i) {
        if (!(s > 0.0)) throw BreakdownError("dense cholesky: non-positive pivot", i);
        ci[i] = std::sqrt(s);
      } else {
        ci[j] = s / cj[j];
      }
    }
  }
  return c;
}

Vector cholesky_solve(const DenseMatrix& chol, std::span<const double> b) {
  const std::size_t n = chol.rows();
  if (b.size() != n) throw DimensionError("cholesky_solve: right-hand side length mismatch");
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = chol.row(i);
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= ci[k] * y[k];
    y[i] = s / ci[i];
  }
  for (std::size_t i = n; i-- > 0;) {
    const double yi = y[i] / chol(i, i);
    y[i] = yi;
    const auto ci = chol.row(i);
    for (std::size_t k = 0; k < i; ++k) y[k] -= ci[k] * yi;
  }
  return y;
}

}  // namespace icopt
