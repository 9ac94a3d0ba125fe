#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace icopt {

using Vector = std::vector<double>;

/// Raised when two operands disagree in size.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a triangular solve or factorization meets a non-positive pivot.
class BreakdownError : public std::runtime_error {
 public:
  BreakdownError(const std::string& what, std::size_t row)
      : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Square sparse matrix in compressed sparse row form.
///
/// Column indices are strictly ascending within each row. Symmetric matrices
/// store both halves explicitly; `symmetric` is a flag set by producers that
/// guarantee value(i,j) == value(j,i) bit for bit.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  Vector values;
  bool symmetric = false;

  std::size_t nnz() const noexcept { return values.size(); }

  /// Throws std::invalid_argument if the CSR invariants do not hold.
  void validate() const;

  /// Stored value at (i, j), or 0 when (i, j) is outside the pattern.
  double at(std::size_t i, std::size_t j) const;

  static CsrMatrix identity(std::size_t n);
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Builds a CSR matrix from coordinate entries. Duplicates are summed in input order.
CsrMatrix csr_from_triplets(std::size_t n, std::vector<Triplet> entries);

/// True when the pattern is structurally symmetric and every mirrored pair is bitwise equal.
bool is_exactly_symmetric(const CsrMatrix& a);

/// Sparse lower-triangular factor L with a frozen pattern; P = L Lᵀ.
///
/// The pattern (row pointers and column indices) is fixed at construction. Only
/// the values can change afterwards. Every row stores its diagonal as the last
/// entry.
class LowerFactor {
 public:
  LowerFactor() = default;
  LowerFactor(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
              Vector values);

  static LowerFactor identity(std::size_t n);
  /// Lower triangle (with diagonal) of `a`'s pattern, values copied from `a`.
  static LowerFactor lower_pattern_of(const CsrMatrix& a);

  std::size_t n() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Position of (i, i) inside values().
  std::size_t diag_pos(std::size_t i) const noexcept { return row_ptr_[i + 1] - 1; }
  double diag(std::size_t i) const noexcept { return values_[diag_pos(i)]; }

  bool same_pattern(const LowerFactor& other) const noexcept {
    return n_ == other.n_ && row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_;
  }

  /// Throws BreakdownError on the first non-positive diagonal entry.
  void check_positive_diagonal() const;

  /// The factor as a general CsrMatrix (lower triangle only).
  CsrMatrix to_csr() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  Vector values_;
};

/// y = A x, accumulated in ascending column order per row.
Vector spmv(const CsrMatrix& a, std::span<const double> x);

/// y = L x.
Vector spmv(const LowerFactor& l, std::span<const double> x);

/// y = Lᵀ x.
Vector spmv_transpose(const LowerFactor& l, std::span<const double> x);

/// Solves L y = b by forward substitution.
Vector lower_solve(const LowerFactor& l, std::span<const double> b);

/// Solves Lᵀ y = b by backward substitution.
Vector upper_solve(const LowerFactor& l, std::span<const double> b);

/// P = L Lᵀ with the symbolic product pattern. Output is exactly symmetric.
CsrMatrix factor_product(const LowerFactor& l);

double frob_norm_sq(const CsrMatrix& m);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

}  // namespace icopt
