#pragma once

#include <optional>
#include <string_view>

#include "icopt/dense.hpp"
#include "icopt/sparse.hpp"

namespace icopt {

/// A = Q diag(lambda) Qᵀ with eigenvalues ascending. Q is empty when only
/// eigenvalues were requested.
struct EigenPair {
  DenseMatrix q;
  Vector lambda;
};

/// Error energy per eigendirection: a_j = sum_i ((Qᵀ E Q)_ij)^2, c = sum_j a_j.
struct ModeEnergies {
  Vector a;
  double c = 0.0;
};

/// Cyclic Jacobi eigensolver for dense symmetric matrices.
///
/// Sweeps use a round-robin ordering so every round applies n/2 disjoint
/// rotations; iteration stops once every off-diagonal magnitude is at most
/// 1e-12 * ||M||_F. Throws std::invalid_argument on asymmetric input and
/// std::runtime_error after 100 sweeps without convergence.
EigenPair sym_eig(const DenseMatrix& m, bool want_vectors = true);

ModeEnergies mode_energies(const DenseMatrix& e, const EigenPair& eig);

struct LemmaResiduals {
  double unweighted = 0.0;  // | ||E||_F^2 - sum a_j | / ||E||_F^2
  double weighted = 0.0;    // | ||E A^-1||_F^2 - sum a_j / lambda_j^2 | / ||E A^-1||_F^2
};

/// Checks both spectral identities for the error E against SPD A, computing
/// E A^{-1} by Cholesky solves rather than an explicit inverse.
LemmaResiduals verify_lemma(const DenseMatrix& a, const DenseMatrix& e);

struct BoundCheck {
  double value = 0.0;  // sum a_j / lambda_j^2
  double bound = 0.0;  // c / lambda_n^2
};

/// Weighted-functional value and its lower bound c / lambda_max^2.
BoundCheck theorem_bound(const ModeEnergies& energies, std::span<const double> lambda);

inline constexpr std::size_t kDenseSpectrumLimit = 4096;

/// Eigenvalues of L^{-1} A L^{-T} (similar to P^{-1} A), ascending. Dense; n <= 4096.
Vector precond_spectrum(const CsrMatrix& a, const LowerFactor& l);

/// Spectrum of A alone.
Vector matrix_spectrum(const CsrMatrix& a);

/// max / min of a positive spectrum.
double condition_number(std::span<const double> eigs);

enum class HistogramScale { linear, log };

std::string_view to_string(HistogramScale scale);
HistogramScale histogram_scale_from_string(std::string_view name);

struct Histogram {
  HistogramScale scale = HistogramScale::log;
  /// num_bins + 1 edges in value space (not log space).
  Vector edges;
  std::vector<std::size_t> counts;
};

/// Equal-width bins (in value or log10-value space) over [lo, hi], defaulting
/// to the data range. The last bin is closed on the right.
Histogram eigen_histogram(std::span<const double> eigs, std::size_t num_bins, HistogramScale scale,
                          std::optional<std::pair<double, double>> range = std::nullopt);

}  // namespace icopt
