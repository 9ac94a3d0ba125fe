#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "icopt/dense.hpp"
#include "icopt/problem.hpp"
#include "icopt/sparse.hpp"

namespace icopt::testing {

inline Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Eigen::MatrixXd to_eigen(const CsrMatrix& a) { return to_eigen(to_dense(a)); }
inline Eigen::MatrixXd to_eigen(const LowerFactor& l) { return to_eigen(to_dense(l)); }

inline DenseMatrix from_eigen(const Eigen::MatrixXd& e) {
  DenseMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> d;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = d(rng);
  return m;
}

inline Eigen::MatrixXd random_orthonormal(std::mt19937_64& rng, std::size_t n) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rng, n, n));
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

/// Q diag(lambda) Qᵀ with lambda log-uniform in [lo, hi].
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, std::size_t n, double lo = 0.1, double hi = 10.0) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  Eigen::VectorXd lambda(n);
  for (auto& x : lambda) x = std::exp(u(rng));
  const Eigen::MatrixXd q = random_orthonormal(rng, n);
  Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

inline CsrMatrix csr_from_eigen(const Eigen::MatrixXd& m) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j)});
  return csr_from_triplets(static_cast<std::size_t>(m.rows()), std::move(t));
}

/// Random sparse lower factor: diagonal in [0.5, 2], each sub-diagonal slot kept with probability `density`.
inline LowerFactor random_factor(std::mt19937_64& rng, std::size_t n, double density = 0.1) {
  std::uniform_real_distribution<double> diag(0.5, 2.0), off(-0.5, 0.5), coin(0.0, 1.0);
  std::vector<std::size_t> rp{0}, ci;
  Vector v;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (coin(rng) < density) {
        ci.push_back(j);
        v.push_back(off(rng));
      }
    }
    ci.push_back(i);
    v.push_back(diag(rng));
    rp.push_back(ci.size());
  }
  return LowerFactor(n, std::move(rp), std::move(ci), std::move(v));
}

/// Factor on a given lower pattern with random values (positive diagonal).
inline LowerFactor randomize_values(std::mt19937_64& rng, LowerFactor l, double diag_lo = 0.5, double diag_hi = 2.0,
                                    double off_mag = 0.5) {
  std::uniform_real_distribution<double> diag(diag_lo, diag_hi), off(-off_mag, off_mag);
  auto v = l.values();
  for (std::size_t i = 0; i < l.n(); ++i)
    for (std::size_t p = l.row_ptr()[i]; p < l.row_ptr()[i + 1]; ++p) v[p] = l.col_idx()[p] == i ? diag(rng) : off(rng);
  return l;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d;
  Vector x(n);
  for (double& e : x) e = d(rng);
  return x;
}

inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double e : x) m = std::max(m, std::abs(e));
  return m;
}

inline CsrMatrix unit_fvm(std::size_t nx) {
  GridSpec g{nx, nx};
  return assemble_fvm(g, CoefficientField{nx, nx, Vector(nx * nx, 1.0)});
}

}  // namespace icopt::testing
