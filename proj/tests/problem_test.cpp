#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "icopt/problem.hpp"
#include "test_util.hpp"

namespace icopt {
namespace {

using testing::to_eigen;

double relative_residual(const CsrMatrix& a, const Vector& x, const Vector& b) {
  Vector r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm2(r) / norm2(b);
}

TEST(GaussianRandomField, UnitContrastIsConstantOne) {
  const CoefficientField f = gaussian_random_field({8, 8}, 3, 0.2, 1.0);
  for (double k : f.k) EXPECT_EQ(k, 1.0);
}

TEST(GaussianRandomField, HitsTargetContrast) {
  for (std::uint64_t seed : {1u, 2u, 3u, 99u, 12345u}) {
    for (double corr : {0.05, 0.2, 1.0}) {
      const CoefficientField f = gaussian_random_field({32, 32}, seed, corr, 10.0);
      EXPECT_NEAR(f.contrast(), 10.0, 1e-8) << "seed " << seed << " corr " << corr;
      for (double k : f.k) EXPECT_GT(k, 0.0);
    }
  }
}

TEST(GaussianRandomField, DeterministicPerSeed) {
  const auto a = gaussian_random_field({16, 16}, 7, 0.2, 10.0);
  const auto b = gaussian_random_field({16, 16}, 7, 0.2, 10.0);
  const auto c = gaussian_random_field({16, 16}, 8, 0.2, 10.0);
  EXPECT_EQ(a.k, b.k);
  EXPECT_NE(a.k, c.k);
}

TEST(GaussianRandomField, RejectsBadInputs) {
  EXPECT_THROW(gaussian_random_field({1, 1}, 1, 0.2, 10.0), std::invalid_argument);  // constant field
  EXPECT_THROW(gaussian_random_field({8, 8}, 1, 0.0, 10.0), std::invalid_argument);
  EXPECT_THROW(gaussian_random_field({8, 8}, 1, 1.5, 10.0), std::invalid_argument);
  EXPECT_THROW(gaussian_random_field({8, 8}, 1, 0.2, 0.5), std::invalid_argument);
  EXPECT_THROW(gaussian_random_field({8, 4}, 1, 0.2, 10.0), std::invalid_argument);
}

TEST(AssembleFvm, UnitCoefficientInteriorStencil) {
  const std::size_t nx = 5;
  const CsrMatrix a = testing::unit_fvm(nx);
  const double inv_h2 = 25.0;
  const std::size_t c = 2 * nx + 2;
  EXPECT_DOUBLE_EQ(a.at(c, c), 4.0 * inv_h2);
  for (std::size_t nb : {c - nx, c - 1, c + 1, c + nx}) EXPECT_DOUBLE_EQ(a.at(c, nb), -inv_h2);
  EXPECT_EQ(a.row_ptr[c + 1] - a.row_ptr[c], 5u);
}

TEST(AssembleFvm, UnitCoefficientCorner) {
  const std::size_t nx = 4;
  const CsrMatrix a = testing::unit_fvm(nx);
  const double inv_h2 = 16.0;
  EXPECT_DOUBLE_EQ(a.at(0, 0), 6.0 * inv_h2);
  EXPECT_DOUBLE_EQ(a.at(0, 1), -inv_h2);
  EXPECT_DOUBLE_EQ(a.at(0, nx), -inv_h2);
  EXPECT_EQ(a.row_ptr[1], 3u);
}

TEST(AssembleFvm, HarmonicTransmissibility) {
  CoefficientField f{2, 2, {1.0, 3.0, 1.0, 1.0}};
  const CsrMatrix a = assemble_fvm({2, 2}, f);
  EXPECT_DOUBLE_EQ(a.at(0, 1), -(2.0 * 1.0 * 3.0 / 4.0) * 4.0);
  EXPECT_DOUBLE_EQ(a.at(1, 1), (6.0 + 1.5 + 6.0 + 1.5) * 4.0);  // south and east faces are Dirichlet
}

TEST(AssembleFvm, SymmetricDominantAndPositiveDefinite) {
  const GridSpec g{8, 8};
  const CsrMatrix a = assemble_fvm(g, gaussian_random_field(g, 4, 0.2, 10.0));
  a.validate();
  EXPECT_TRUE(is_exactly_symmetric(a));
  for (std::size_t i = 0; i < a.n; ++i) {
    double off = 0.0;
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      if (a.col_idx[p] != i) off += std::abs(a.values[p]);
    const double d = a.at(i, i);
    EXPECT_GT(d, 0.0);
    EXPECT_GE(d, off * (1.0 - 1e-14));
    const std::size_t x = i % 8, y = i / 8;
    if (x == 0 || y == 0 || x == 7 || y == 7) {
      EXPECT_GT(d, off * (1.0 + 1e-6));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(AssembleFvm, RotationPermutesMatrix) {
  const std::size_t n = 9;
  const GridSpec g{n, n};
  const CoefficientField f = gaussian_random_field(g, 21, 0.3, 10.0);
  // Rotate the field by 90 degrees: cell (i, j) moves to (n-1-j, i).
  auto rot = [n](std::size_t c) { return (c % n) * n + (n - 1 - c / n); };
  CoefficientField fr = f;
  for (std::size_t c = 0; c < n * n; ++c) fr.k[rot(c)] = f.k[c];
  const CsrMatrix a = assemble_fvm(g, f);
  const CsrMatrix ar = assemble_fvm(g, fr);

  std::mt19937_64 rng(1);
  const Vector x = testing::random_vector(rng, n * n);
  Vector xr(n * n);
  for (std::size_t c = 0; c < n * n; ++c) xr[rot(c)] = x[c];
  const Vector y = spmv(a, x);
  const Vector yr = spmv(ar, xr);
  for (std::size_t c = 0; c < n * n; ++c) EXPECT_NEAR(yr[rot(c)], y[c], 1e-12 * testing::max_abs(y));
}

TEST(SampleProbes, ZeroCountIsAnError) { EXPECT_THROW(sample_probes(4, 0, 1), std::invalid_argument); }

TEST(SampleProbes, BitwiseReproducible) {
  const ProbeSet a = sample_probes(16, 5, 42);
  const ProbeSet b = sample_probes(16, 5, 42);
  EXPECT_EQ(a.probes, b.probes);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_FALSE(a.has_solutions());
  EXPECT_NE(sample_probes(16, 5, 43).probes, a.probes);
}

TEST(SampleProbes, SquaredNormConcentratesAtOne) {
  const std::size_t n = 1024;
  const ProbeSet p = sample_probes(n, 1000, 9);
  double mean = 0.0;
  for (const auto& b : p.probes) mean += dot(b, b) / static_cast<double>(n);
  mean /= 1000.0;
  EXPECT_NEAR(mean, 1.0, 0.05);
}

TEST(AttachSolutions, IdentityAndScalar) {
  const ProbeSet p = attach_solutions(CsrMatrix::identity(4), sample_probes(4, 3, 1));
  ASSERT_TRUE(p.has_solutions());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ((*p.solutions)[i], p.probes[i]);

  const CsrMatrix two = csr_from_triplets(1, {{0, 0, 2.0}});
  ProbeSet s;
  s.probes = {{4.0}};
  EXPECT_EQ((*attach_solutions(two, s).solutions)[0], Vector{2.0});
}

TEST(AttachSolutions, RandomSpdResidual) {
  std::mt19937_64 rng(3);
  const CsrMatrix a = testing::csr_from_eigen(testing::random_spd(rng, 64, 1e-2, 1e2));
  const ProbeSet p = attach_solutions(a, sample_probes(64, 20, 5));
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LE(relative_residual(a, (*p.solutions)[i], p.probes[i]), 1e-10);
}

TEST(AttachSolutions, IterativePathAboveDenseLimit) {
  const GridSpec g{65, 65};
  ASSERT_GT(g.cells(), kDenseLimit);
  const CsrMatrix a = assemble_fvm(g, gaussian_random_field(g, 1, 0.2, 10.0));
  const ProbeSet p = attach_solutions(a, sample_probes(a.n, 2, 5));
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LE(relative_residual(a, (*p.solutions)[i], p.probes[i]), 1e-10);
}

}  // namespace
}  // namespace icopt
