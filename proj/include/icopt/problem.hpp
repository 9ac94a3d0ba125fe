#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "icopt/sparse.hpp"

namespace icopt {

/// Uniform cell-centered grid on the unit square, nx == ny, h = 1/nx.
struct GridSpec {
  std::size_t nx = 64;
  std::size_t ny = 64;

  std::size_t cells() const noexcept { return nx * ny; }
  double h() const noexcept { return 1.0 / static_cast<double>(nx); }
  /// Throws std::invalid_argument unless nx == ny >= 2.
  void validate() const;
};

/// Positive diffusion coefficient per cell, cell (i, j) stored at j * nx + i.
struct CoefficientField {
  std::size_t nx = 0;
  std::size_t ny = 0;
  Vector k;

  double contrast() const;
};

/// Seeded 64-bit Mersenne Twister with portable uniform/normal transforms.
///
/// std::normal_distribution is implementation-defined, so normals come from
/// the Box-Muller transform on two 53-bit uniforms; the cosine branch is used
/// and the sine branch is cached for the next draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Uniform on (0, 1].
  double uniform();
  double normal();
  /// Uniform integer in [0, bound).
  std::size_t index(std::size_t bound);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

CoefficientField gaussian_random_field(const GridSpec& spec, std::uint64_t seed, double corr_len,
                                       double target_contrast);

/// Cell-centered finite-volume matrix of -div(k grad u) with homogeneous Dirichlet boundaries.
CsrMatrix assemble_fvm(const GridSpec& spec, const CoefficientField& field);

/// Right-hand sides b_i ~ N(0, I) and, once attached, x_i = A^{-1} b_i.
struct ProbeSet {
  std::vector<Vector> probes;
  std::optional<std::vector<Vector>> solutions;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return probes.size(); }
  bool has_solutions() const noexcept { return solutions.has_value(); }
};

ProbeSet sample_probes(std::size_t n, std::size_t count, std::uint64_t seed);

/// Dense Cholesky for n <= 4096, IC(0)-preconditioned CG otherwise.
/// Every stored solution has relative residual <= 1e-10.
ProbeSet attach_solutions(const CsrMatrix& a, ProbeSet probes);

inline constexpr std::size_t kDenseLimit = 4096;

}  // namespace icopt
