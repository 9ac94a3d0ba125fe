#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "icopt/sparse.hpp"

namespace icopt {

/// Row-major dense matrix for diagnostic-scale work (n <= 4096).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  DenseMatrix transpose() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix to_dense(const CsrMatrix& a);
DenseMatrix to_dense(const LowerFactor& l);

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);

double frob_norm_sq(const DenseMatrix& m);

/// Lower Cholesky factor of an SPD matrix. Throws BreakdownError on a non-positive pivot.
DenseMatrix dense_cholesky(const DenseMatrix& a);

/// Solves (C Cᵀ) x = b given the lower Cholesky factor C.
Vector cholesky_solve(const DenseMatrix& chol, std::span<const double> b);

}  // namespace icopt
