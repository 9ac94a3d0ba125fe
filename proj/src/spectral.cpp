#include "icopt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace icopt {

namespace {

struct Rotation {
  std::size_t p;
  std::size_t q;
  double c;
  double s;
};

void check_square(const DenseMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(what) + ": matrix must be square");
}

}  // namespace

EigenPair sym_eig(const DenseMatrix& m, bool want_vectors) {
  check_square(m, "sym_eig");
  const std::size_t n = m.rows();
  const double fro = std::sqrt(frob_norm_sq(m));
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) asym += 2.0 * (m(i, j) - m(j, i)) * (m(i, j) - m(j, i));
  if (std::sqrt(asym) > 1e-12 * fro) throw std::invalid_argument("sym_eig: matrix is not symmetric");

  DenseMatrix a = m;
  DenseMatrix v = want_vectors ? DenseMatrix::identity(n) : DenseMatrix{};
  const double tol = 1e-12 * fro;

  // Round-robin tournament: each round pairs every index exactly once; a
  // padding index (== n) marks the bye when n is odd.
  const std::size_t slots = n + (n % 2);
  std::vector<std::size_t> players(slots);
  std::iota(players.begin(), players.end(), std::size_t{0});
  std::vector<Rotation> rotations;
  rotations.reserve(slots / 2);

  bool converged = false;
  for (int sweep = 0; sweep <= 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(a(i, j)));
    if (off <= tol) {
      converged = true;
      break;
    }
    if (sweep == 100) break;

    for (std::size_t round = 0; round + 1 < slots; ++round) {
      rotations.clear();
      for (std::size_t k = 0; k < slots / 2; ++k) {
        std::size_t p = players[k];
        std::size_t q = players[slots - 1 - k];
        if (p >= n || q >= n) continue;
        if (p > q) std::swap(p, q);
        const double apq = a(p, q);
        if (std::abs(apq) <= tol) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        rotations.push_back({p, q, c, t * c});
      }
      std::rotate(players.begin() + 1, players.end() - 1, players.end());
      if (rotations.empty()) continue;

      for (const auto& r : rotations) {
        auto rp = a.row(r.p);
        auto rq = a.row(r.q);
        for (std::size_t k = 0; k < n; ++k) {
          const double xp = rp[k];
          const double xq = rq[k];
          rp[k] = r.c * xp - r.s * xq;
          rq[k] = r.s * xp + r.c * xq;
        }
      }
      auto rotate_columns = [&](DenseMatrix& target) {
        for (std::size_t k = 0; k < n; ++k) {
          auto row = target.row(k);
          for (const auto& r : rotations) {
            const double xp = row[r.p];
            const double xq = row[r.q];
            row[r.p] = r.c * xp - r.s * xq;
            row[r.q] = r.s * xp + r.c * xq;
          }
        }
      };
      rotate_columns(a);
      if (want_vectors) rotate_columns(v);
      for (const auto& r : rotations) {
        a(r.p, r.q) = 0.0;
        a(r.q, r.p) = 0.0;
      }
    }
  }
  if (!converged) throw std::runtime_error("sym_eig: Jacobi iteration did not converge in 100 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  EigenPair out;
  out.lambda.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.lambda[k] = a(order[k], order[k]);
  if (want_vectors) {
    out.q = DenseMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) out.q(i, k) = v(i, order[k]);
  }
  return out;
}

ModeEnergies mode_energies(const DenseMatrix& e, const EigenPair& eig) {
  check_square(e, "mode_energies");
  if (eig.q.rows() != e.rows() || eig.lambda.size() != e.rows()) {
    throw DimensionError("mode_energies: eigenbasis dimension does not match E");
  }
  const DenseMatrix projected = eig.q.transpose() * (e * eig.q);
  ModeEnergies out;
  out.a.assign(e.rows(), 0.0);
  for (std::size_t i = 0; i < projected.rows(); ++i) {
    const auto row = projected.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out.a[j] += row[j] * row[j];
  }
  for (double x : out.a) out.c += x;
  return out;
}

LemmaResiduals verify_lemma(const DenseMatrix& a, const DenseMatrix& e) {
  check_square(a, "verify_lemma");
  if (e.rows() != a.rows() || e.cols() != a.cols()) throw DimensionError("verify_lemma: E and A differ in shape");
  const double e_sq = frob_norm_sq(e);
  if (e_sq == 0.0) return {};

  const EigenPair eig = sym_eig(a);
  if (!(eig.lambda.front() > 0.0)) throw std::invalid_argument("verify_lemma: A must be positive definite");
  const ModeEnergies energies = mode_energies(e, eig);

  // Row i of E A^{-1} solves A y = E(i, :)ᵀ since A is symmetric.
  const DenseMatrix chol = dense_cholesky(a);
  double weighted_direct = 0.0;
  for (std::size_t i = 0; i < e.rows(); ++i) {
    const Vector y = cholesky_solve(chol, e.row(i));
    for (double x : y) weighted_direct += x * x;
  }
  double weighted_modes = 0.0;
  for (std::size_t j = 0; j < energies.a.size(); ++j) {
    weighted_modes += energies.a[j] / (eig.lambda[j] * eig.lambda[j]);
  }
  return {std::abs(e_sq - energies.c) / e_sq, std::abs(weighted_direct - weighted_modes) / weighted_direct};
}

BoundCheck theorem_bound(const ModeEnergies& energies, std::span<const double> lambda) {
  if (energies.a.size() != lambda.size() || lambda.empty()) {
    throw DimensionError("theorem_bound: energies and eigenvalues differ in length");
  }
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (!(lambda[j] > 0.0)) throw std::invalid_argument("theorem_bound: eigenvalues must be positive");
    if (j > 0 && lambda[j] < lambda[j - 1]) throw std::invalid_argument("theorem_bound: eigenvalues must be ascending");
    if (energies.a[j] < 0.0) throw std::invalid_argument("theorem_bound: mode energies must be non-negative");
  }
  if (!(energies.c > 0.0)) throw std::invalid_argument("theorem_bound: total energy c must be positive");

  BoundCheck out;
  for (std::size_t j = 0; j < lambda.size(); ++j) out.value += energies.a[j] / (lambda[j] * lambda[j]);
  out.bound = energies.c / (lambda.back() * lambda.back());
  if (out.value < out.bound * (1.0 - 1e-12)) {
    throw std::logic_error("theorem_bound: value fell below the bound; energies and c are inconsistent");
  }
  return out;
}

Vector precond_spectrum(const CsrMatrix& a, const LowerFactor& l) {
  if (a.n != l.n()) throw DimensionError("precond_spectrum: factor and matrix dimensions differ");
  if (a.n > kDenseSpectrumLimit) {
    throw std::invalid_argument("precond_spectrum: n = " + std::to_string(a.n) +
                                " exceeds the dense limit; compare CG iteration counts instead");
  }
  l.check_positive_diagonal();
  const std::size_t n = a.n;
  DenseMatrix s(n, n);
  Vector unit(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    const Vector col = lower_solve(l, spmv(a, upper_solve(l, unit)));
    unit[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) s(i, j) = col[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = avg;
      s(j, i) = avg;
    }
  return sym_eig(s, false).lambda;
}

Vector matrix_spectrum(const CsrMatrix& a) {
  if (a.n > kDenseSpectrumLimit) throw std::invalid_argument("matrix_spectrum: n exceeds the dense limit");
  return sym_eig(to_dense(a), false).lambda;
}

double condition_number(std::span<const double> eigs) {
  if (eigs.empty()) throw std::invalid_argument("condition_number: empty spectrum");
  const auto [lo, hi] = std::minmax_element(eigs.begin(), eigs.end());
  if (!(*lo > 0.0)) throw std::domain_error("condition_number: non-positive eigenvalue, operator is not positive definite");
  return *hi / *lo;
}

std::string_view to_string(HistogramScale scale) { return scale == HistogramScale::log ? "log" : "linear"; }

HistogramScale histogram_scale_from_string(std::string_view name) {
  if (name == "log") return HistogramScale::log;
  if (name == "linear") return HistogramScale::linear;
  throw std::invalid_argument("unknown histogram scale '" + std::string(name) + "'");
}

Histogram eigen_histogram(std::span<const double> eigs, std::size_t num_bins, HistogramScale scale,
                          std::optional<std::pair<double, double>> range) {
  if (num_bins < 1) throw std::invalid_argument("eigen_histogram: need at least one bin");
  if (eigs.empty()) throw std::invalid_argument("eigen_histogram: empty spectrum");
  const bool log_scale = scale == HistogramScale::log;
  auto to_axis = [&](double x) {
    if (log_scale && !(x > 0.0)) throw std::domain_error("eigen_histogram: log scale needs positive values");
    return log_scale ? std::log10(x) : x;
  };
  const auto [mn, mx] = std::minmax_element(eigs.begin(), eigs.end());
  const double lo = to_axis(range ? range->first : *mn);
  const double hi = to_axis(range ? range->second : *mx);
  if (hi < lo) throw std::invalid_argument("eigen_histogram: empty range");

  Histogram h;
  h.scale = scale;
  h.counts.assign(num_bins, 0);
  h.edges.resize(num_bins + 1);
  const double width = (hi - lo) / static_cast<double>(num_bins);
  for (std::size_t b = 0; b <= num_bins; ++b) {
    const double axis = b == num_bins ? hi : lo + width * static_cast<double>(b);
    h.edges[b] = log_scale ? std::pow(10.0, axis) : axis;
  }
  for (double x : eigs) {
    const double t = to_axis(x);
    if (t < lo || t > hi) throw std::invalid_argument("eigen_histogram: value outside the requested range");
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((t - lo) / width) : 0;
    ++h.counts[std::min(b, num_bins - 1)];
  }
  return h;
}

}  // namespace icopt
