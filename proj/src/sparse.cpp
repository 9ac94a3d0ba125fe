#include "icopt/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace icopt {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

void validate_pattern(std::size_t n, const std::vector<std::size_t>& row_ptr,
                      const std::vector<std::size_t>& col_idx, std::size_t nvalues) {
  if (row_ptr.size() != n + 1) throw std::invalid_argument("row_ptr must have n+1 entries");
  if (row_ptr.front() != 0) throw std::invalid_argument("row_ptr[0] must be 0");
  if (row_ptr.back() != col_idx.size() || col_idx.size() != nvalues) {
    throw std::invalid_argument("row_ptr[n], col_idx and values disagree on nnz");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) throw std::invalid_argument("row_ptr must be non-decreasing");
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      if (col_idx[p] >= n) throw std::invalid_argument("column index out of range");
      if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1]) {
        throw std::invalid_argument("column indices must be strictly ascending in row " +
                                    std::to_string(i));
      }
    }
  }
}

}  // namespace

void CsrMatrix::validate() const {
  validate_pattern(n, row_ptr, col_idx, values.size());
  if (symmetric && !is_exactly_symmetric(*this)) {
    throw std::invalid_argument("matrix flagged symmetric is not");
  }
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  CsrMatrix m;
  m.n = n;
  m.row_ptr.resize(n + 1);
  std::iota(m.row_ptr.begin(), m.row_ptr.end(), std::size_t{0});
  m.col_idx.resize(n);
  std::iota(m.col_idx.begin(), m.col_idx.end(), std::size_t{0});
  m.values.assign(n, 1.0);
  m.symmetric = true;
  return m;
}

CsrMatrix csr_from_triplets(std::size_t n, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= n || t.col >= n) throw std::invalid_argument("triplet index out of range");
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(1, 0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (; k < entries.size() && entries[k].row == i; ++k) {
      if (m.col_idx.size() > m.row_ptr.back() && m.col_idx.back() == entries[k].col) {
        m.values.back() += entries[k].value;
      } else {
        m.col_idx.push_back(entries[k].col);
        m.values.push_back(entries[k].value);
      }
    }
    m.row_ptr.push_back(m.col_idx.size());
  }
  m.symmetric = is_exactly_symmetric(m);
  return m;
}

bool is_exactly_symmetric(const CsrMatrix& a) {
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const std::size_t j = a.col_idx[p];
      if (j == i) continue;
      auto first = a.col_idx.begin() + static_cast<std::ptrdiff_t>(a.row_ptr[j]);
      auto last = a.col_idx.begin() + static_cast<std::ptrdiff_t>(a.row_ptr[j + 1]);
      auto it = std::lower_bound(first, last, i);
      if (it == last || *it != i) return false;
      if (a.values[static_cast<std::size_t>(it - a.col_idx.begin())] != a.values[p]) return false;
    }
  }
  return true;
}

LowerFactor::LowerFactor(std::size_t n, std::vector<std::size_t> row_ptr,
                         std::vector<std::size_t> col_idx, Vector values)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
  validate_pattern(n_, row_ptr_, col_idx_, values_.size());
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_ptr_[i] == row_ptr_[i + 1] || col_idx_[row_ptr_[i + 1] - 1] != i) {
      throw std::invalid_argument("lower factor row " + std::to_string(i) +
                                  " must end with its diagonal entry");
    }
  }
}

LowerFactor LowerFactor::identity(std::size_t n) {
  std::vector<std::size_t> rp(n + 1);
  std::iota(rp.begin(), rp.end(), std::size_t{0});
  std::vector<std::size_t> ci(n);
  std::iota(ci.begin(), ci.end(), std::size_t{0});
  return LowerFactor(n, std::move(rp), std::move(ci), Vector(n, 1.0));
}

LowerFactor LowerFactor::lower_pattern_of(const CsrMatrix& a) {
  std::vector<std::size_t> rp{0};
  std::vector<std::size_t> ci;
  Vector v;
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1] && a.col_idx[p] <= i; ++p) {
      ci.push_back(a.col_idx[p]);
      v.push_back(a.values[p]);
    }
    rp.push_back(ci.size());
  }
  return LowerFactor(a.n, std::move(rp), std::move(ci), std::move(v));
}

void LowerFactor::check_positive_diagonal() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (!(diag(i) > 0.0)) throw BreakdownError("non-positive diagonal in lower factor", i);
  }
}

CsrMatrix LowerFactor::to_csr() const {
  CsrMatrix m;
  m.n = n_;
  m.row_ptr = row_ptr_;
  m.col_idx = col_idx_;
  m.values = values_;
  m.symmetric = n_ == nnz();
  return m;
}

Vector spmv(const CsrMatrix& a, std::span<const double> x) {
  require_size(x.size(), a.n, "spmv");
  Vector y(a.n, 0.0);
  for (std::size_t i = 0; i < a.n; ++i) {
    double s = 0.0;
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) s += a.values[p] * x[a.col_idx[p]];
    y[i] = s;
  }
  return y;
}

Vector spmv(const LowerFactor& l, std::span<const double> x) {
  require_size(x.size(), l.n(), "spmv");
  const auto rp = l.row_ptr();
  const auto ci = l.col_idx();
  const auto v = l.values();
  Vector y(l.n(), 0.0);
  for (std::size_t i = 0; i < l.n(); ++i) {
    double s = 0.0;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * x[ci[p]];
    y[i] = s;
  }
  return y;
}

Vector spmv_transpose(const LowerFactor& l, std::span<const double> x) {
  require_size(x.size(), l.n(), "spmv_transpose");
  const auto rp = l.row_ptr();
  const auto ci = l.col_idx();
  const auto v = l.values();
  Vector y(l.n(), 0.0);
  for (std::size_t i = 0; i < l.n(); ++i) {
    const double xi = x[i];
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) y[ci[p]] += v[p] * xi;
  }
  return y;
}

Vector lower_solve(const LowerFactor& l, std::span<const double> b) {
  require_size(b.size(), l.n(), "lower_solve");
  const auto rp = l.row_ptr();
  const auto ci = l.col_idx();
  const auto v = l.values();
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < l.n(); ++i) {
    const std::size_t d = rp[i + 1] - 1;
    if (!(v[d] > 0.0)) throw BreakdownError("lower_solve: non-positive diagonal", i);
    double s = y[i];
    for (std::size_t p = rp[i]; p < d; ++p) s -= v[p] * y[ci[p]];
    y[i] = s / v[d];
  }
  return y;
}

Vector upper_solve(const LowerFactor& l, std::span<const double> b) {
  require_size(b.size(), l.n(), "upper_solve");
  const auto rp = l.row_ptr();
  const auto ci = l.col_idx();
  const auto v = l.values();
  Vector y(b.begin(), b.end());
  for (std::size_t i = l.n(); i-- > 0;) {
    const std::size_t d = rp[i + 1] - 1;
    if (!(v[d] > 0.0)) throw BreakdownError("upper_solve: non-positive diagonal", i);
    const double yi = y[i] / v[d];
    y[i] = yi;
    for (std::size_t p = rp[i]; p < d; ++p) y[ci[p]] -= v[p] * yi;
  }
  return y;
}

CsrMatrix factor_product(const LowerFactor& l) {
  const std::size_t n = l.n();
  const auto rp = l.row_ptr();
  const auto ci = l.col_idx();
  const auto v = l.values();

  // Rows of L that touch each column: candidates for sharing a term with a given row.
  std::vector<std::vector<std::size_t>> rows_in_col(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) rows_in_col[ci[p]].push_back(i);

  auto row_dot = [&](std::size_t i, std::size_t j) {
    std::size_t p = rp[i], q = rp[j];
    double s = 0.0;
    while (p < rp[i + 1] && q < rp[j + 1]) {
      if (ci[p] < ci[q]) {
        ++p;
      } else if (ci[q] < ci[p]) {
        ++q;
      } else {
        s += v[p] * v[q];
        ++p;
        ++q;
      }
    }
    return s;
  };

  // Lower-triangle pattern and values first, then mirror so both halves hold identical bits.
  std::vector<std::vector<std::size_t>> lower_cols(n);
  std::vector<std::vector<double>> lower_vals(n);
  std::vector<std::size_t> mark(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> cols;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      for (std::size_t j : rows_in_col[ci[p]]) {
        if (j <= i && mark[j] != i) {
          mark[j] = i;
          cols.push_back(j);
        }
      }
    }
    std::sort(cols.begin(), cols.end());
    lower_vals[i].reserve(cols.size());
    for (std::size_t j : cols) lower_vals[i].push_back(row_dot(i, j));
    lower_cols[i] = std::move(cols);
  }

  std::vector<std::vector<std::size_t>> upper_cols(n);
  std::vector<std::vector<double>> upper_vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < lower_cols[i].size(); ++k) {
      const std::size_t j = lower_cols[i][k];
      if (j == i) continue;
      upper_cols[j].push_back(i);
      upper_vals[j].push_back(lower_vals[i][k]);
    }
  }

  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    m.col_idx.insert(m.col_idx.end(), lower_cols[i].begin(), lower_cols[i].end());
    m.values.insert(m.values.end(), lower_vals[i].begin(), lower_vals[i].end());
    m.col_idx.insert(m.col_idx.end(), upper_cols[i].begin(), upper_cols[i].end());
    m.values.insert(m.values.end(), upper_vals[i].begin(), upper_vals[i].end());
    m.row_ptr.push_back(m.col_idx.size());
  }
  m.symmetric = true;
  return m;
}

double frob_norm_sq(const CsrMatrix& m) {
  double s = 0.0;
  for (double x : m.values) s += x * x;
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_size(y.size(), x.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

}  // namespace icopt
