#include <gtest/gtest.h>

#include <Eigen/Cholesky>
#include <cmath>

#include "icopt/ic0.hpp"
#include "test_util.hpp"

namespace icopt {
namespace {

using testing::to_eigen;

TEST(Ic0, DiagonalMatrix) {
  const LowerFactor l = ic0_factorize(csr_from_triplets(2, {{0, 0, 4.0}, {1, 1, 9.0}}));
  EXPECT_EQ(l.nnz(), 2u);
  EXPECT_EQ(l.diag(0), 2.0);
  EXPECT_EQ(l.diag(1), 3.0);
}

TEST(Ic0, DenseTwoByTwoEqualsCholesky) {
  const LowerFactor l = ic0_factorize(csr_from_triplets(2, {{0, 0, 4}, {0, 1, 2}, {1, 0, 2}, {1, 1, 3}}));
  ASSERT_EQ(l.nnz(), 3u);
  EXPECT_DOUBLE_EQ(l.values()[0], 2.0);
  EXPECT_DOUBLE_EQ(l.values()[1], 1.0);
  EXPECT_DOUBLE_EQ(l.values()[2], std::sqrt(2.0));
}

TEST(Ic0, TridiagonalEqualsDenseCholesky) {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  const std::size_t n = 20;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double v = off(rng);
    t.push_back({i, i + 1, v});
    t.push_back({i + 1, i, v});
  }
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 2.5 + off(rng)});
  const CsrMatrix a = csr_from_triplets(n, t);
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(to_eigen(a)).matrixL();
  const Eigen::MatrixXd l = to_eigen(ic0_factorize(a));
  EXPECT_LE((l - chol).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ic0, ArrowheadHasNoFill) {
  // Dense last row and column: exact Cholesky keeps the pattern.
  const std::size_t n = 12;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.push_back({i, i, 3.0 + 0.1 * static_cast<double>(i)});
    t.push_back({i, n - 1, 0.5});
    t.push_back({n - 1, i, 0.5});
  }
  t.push_back({n - 1, n - 1, 10.0});
  const CsrMatrix a = csr_from_triplets(n, t);
  const Eigen::MatrixXd l = to_eigen(ic0_factorize(a));
  const Eigen::MatrixXd ad = to_eigen(a);
  EXPECT_LE((l * l.transpose() - ad).norm(), 1e-10 * ad.norm());
}

TEST(Ic0, PatternIsLowerTriangleOfA) {
  const GridSpec g{6, 6};
  const CsrMatrix a = assemble_fvm(g, gaussian_random_field(g, 2, 0.2, 10.0));
  const LowerFactor l = ic0_factorize(a);
  EXPECT_TRUE(l.same_pattern(LowerFactor::lower_pattern_of(a)));
}

TEST(Ic0, FvmMatchesAOnItsPattern) {
  const GridSpec g{8, 8};
  const CsrMatrix a = assemble_fvm(g, gaussian_random_field(g, 5, 0.2, 10.0));
  const LowerFactor l = ic0_factorize(a);
  const Eigen::MatrixXd dl = to_eigen(l);
  const Eigen::MatrixXd p = dl * dl.transpose();
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t q = a.row_ptr[i]; q < a.row_ptr[i + 1]; ++q) {
      const std::size_t j = a.col_idx[q];
      EXPECT_NEAR(p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), a.values[q],
                  1e-10 * std::abs(a.values[q]));
    }
  }
}

TEST(Ic0, BreakdownNamesRow) {
  const CsrMatrix a = csr_from_triplets(2, {{0, 0, 1}, {0, 1, 2}, {1, 0, 2}, {1, 1, 1}});
  try {
    ic0_factorize(a);
    FAIL() << "expected breakdown";
  } catch (const BreakdownError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(Ic0, RejectsAsymmetricInput) {
  const CsrMatrix a = csr_from_triplets(2, {{0, 0, 4}, {0, 1, 1}, {1, 1, 4}});
  EXPECT_THROW(ic0_factorize(a), std::invalid_argument);
}

}  // namespace
}  // namespace icopt
