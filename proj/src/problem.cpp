#include "icopt/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "icopt/dense.hpp"
#include "icopt/ic0.hpp"
#include "icopt/solver.hpp"

namespace icopt {

void GridSpec::validate() const {
  if (nx != ny) throw std::invalid_argument("grid must be square (nx == ny)");
  if (nx < 2) throw std::invalid_argument("grid needs at least 2 cells per axis");
}

double CoefficientField::contrast() const {
  const auto [lo, hi] = std::minmax_element(k.begin(), k.end());
  return *hi / *lo;
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::size_t Rng::index(std::size_t bound) {
  // Rejection keeps the draw unbiased for any bound.
  const std::uint64_t b = bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % b;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % b);
}

namespace {

// Half-sample symmetric reflection into [0, n), folded for offsets beyond one period.
std::size_t reflect(long idx, long n) {
  const long period = 2 * n;
  long m = idx % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - 1 - m);
}

Vector gaussian_kernel(double sigma) {
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  Vector w(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (long d = -radius; d <= radius; ++d) {
    const double x = static_cast<double>(d) / sigma;
    w[static_cast<std::size_t>(d + radius)] = std::exp(-0.5 * x * x);
    sum += w[static_cast<std::size_t>(d + radius)];
  }
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace

CoefficientField gaussian_random_field(const GridSpec& spec, std::uint64_t seed, double corr_len,
                                       double target_contrast) {
  if (spec.nx != spec.ny || spec.nx == 0) throw std::invalid_argument("grid must be square and non-empty");
  if (!(corr_len > 0.0 && corr_len <= 1.0)) throw std::invalid_argument("corr_len must lie in (0, 1]");
  if (!(target_contrast >= 1.0) || !std::isfinite(target_contrast)) {
    throw std::invalid_argument("target_contrast must be finite and >= 1");
  }
  const std::size_t nx = spec.nx;
  const std::size_t ncells = spec.cells();
  CoefficientField field{spec.nx, spec.ny, Vector(ncells, 1.0)};
  if (target_contrast == 1.0) return field;

  Rng rng(seed);
  Vector noise(ncells);
  for (double& x : noise) x = rng.normal();

  // Separable isotropic Gaussian smoothing: x sweep, then y sweep.
  const Vector w = gaussian_kernel(corr_len * static_cast<double>(nx));
  const long radius = static_cast<long>(w.size() / 2);
  const long n = static_cast<long>(nx);
  Vector tmp(ncells, 0.0);
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i) {
      double s = 0.0;
      for (long d = -radius; d <= radius; ++d)
        s += w[static_cast<std::size_t>(d + radius)] * noise[static_cast<std::size_t>(j * n) + reflect(i + d, n)];
      tmp[static_cast<std::size_t>(j * n + i)] = s;
    }
  Vector g(ncells, 0.0);
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i) {
      double s = 0.0;
      for (long d = -radius; d <= radius; ++d)
        s += w[static_cast<std::size_t>(d + radius)] * tmp[reflect(j + d, n) * nx + static_cast<std::size_t>(i)];
      g[static_cast<std::size_t>(j * n + i)] = s;
    }

  const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw std::invalid_argument("degenerate random field: smoothed values are constant");
  double mean = 0.0;
  for (double x : g) mean += x;
  mean /= static_cast<double>(ncells);

  // Affine map so the log-field spans exactly ln(target_contrast), centered on its mean.
  const double scale = std::log(target_contrast) / range;
  for (std::size_t c = 0; c < ncells; ++c) field.k[c] = std::exp(scale * (g[c] - mean));
  return field;
}

CsrMatrix assemble_fvm(const GridSpec& spec, const CoefficientField& field) {
  spec.validate();
  if (field.nx != spec.nx || field.ny != spec.ny || field.k.size() != spec.cells()) {
    throw DimensionError("coefficient field does not match the grid");
  }
  for (double k : field.k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("coefficients must be positive and finite");
  }
  const std::size_t nx = spec.nx;
  const std::size_t n = spec.cells();
  const double inv_h2 = static_cast<double>(nx) * static_cast<double>(nx);
  const auto& k = field.k;
  auto face = [&](std::size_t a, std::size_t b) { return 2.0 * k[a] * k[b] / (k[a] + k[b]) * inv_h2; };
  auto boundary = [&](std::size_t a) { return 2.0 * k[a] * inv_h2; };

  CsrMatrix m;
  m.n = n;
  m.row_ptr.reserve(n + 1);
  m.col_idx.reserve(5 * n);
  m.values.reserve(5 * n);
  for (std::size_t j = 0; j < nx; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t c = j * nx + i;
      // Faces in ascending neighbor index: south, west, east, north.
      const double ts = j > 0 ? face(c, c - nx) : boundary(c);
      const double tw = i > 0 ? face(c, c - 1) : boundary(c);
      const double te = i + 1 < nx ? face(c, c + 1) : boundary(c);
      const double tn = j + 1 < nx ? face(c, c + nx) : boundary(c);
      if (j > 0) {
        m.col_idx.push_back(c - nx);
        m.values.push_back(-ts);
      }
      if (i > 0) {
        m.col_idx.push_back(c - 1);
        m.values.push_back(-tw);
      }
      m.col_idx.push_back(c);
      m.values.push_back(ts + tw + te + tn);
      if (i + 1 < nx) {
        m.col_idx.push_back(c + 1);
        m.values.push_back(-te);
      }
      if (j + 1 < nx) {
        m.col_idx.push_back(c + nx);
        m.values.push_back(-tn);
      }
      m.row_ptr.push_back(m.col_idx.size());
    }
  }
  m.symmetric = true;
  return m;
}

ProbeSet sample_probes(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("probe count must be at least 1");
  if (n == 0) throw std::invalid_argument("probe dimension must be positive");
  Rng rng(seed);
  ProbeSet set;
  set.seed = seed;
  set.probes.assign(count, Vector(n));
  for (auto& b : set.probes)
    for (double& x : b) x = rng.normal();
  return set;
}

namespace {

double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b) {
  Vector r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

}  // namespace

ProbeSet attach_solutions(const CsrMatrix& a, ProbeSet probes) {
  constexpr double kTol = 1e-10;
  std::vector<Vector> solutions;
  solutions.reserve(probes.size());
  for (const auto& b : probes.probes) {
    if (b.size() != a.n) throw DimensionError("probe length does not match the matrix");
  }

  if (a.n <= kDenseLimit) {
    const DenseMatrix chol = dense_cholesky(to_dense(a));
    for (const auto& b : probes.probes) {
      Vector x = cholesky_solve(chol, b);
      // One step of iterative refinement, always taken so results are not
      // left a rounding step away from the exact solution.
      Vector r = spmv(a, x);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
      const Vector dx = cholesky_solve(chol, r);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
      if (relative_residual(a, x, b) > kTol) {
        throw std::runtime_error("attach_solutions: dense solve did not reach relative residual 1e-10");
      }
      solutions.push_back(std::move(x));
    }
  } else {
    const LowerFactor l = ic0_factorize(a);
    for (const auto& b : probes.probes) {
      PcgResult res = pcg(a, b, &l, {.rel_tol = 1e-12, .max_iter = 20 * a.n});
      solutions.push_back(std::move(res.x));
    }
  }
  probes.solutions = std::move(solutions);
  return probes;
}

}  // namespace icopt
