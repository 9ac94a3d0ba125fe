#pragma once

#include <stdexcept>
#include <string>

#include "icopt/sparse.hpp"

namespace icopt {

struct PcgOptions {
  double rel_tol = 1e-8;
  /// 0 means 10 * n.
  std::size_t max_iter = 0;
};

struct PcgResult {
  Vector x;
  std::size_t iterations = 0;
  /// True relative residual ||b - A x_k|| / ||b||, k = 0..iterations (entry 0 is 1).
  Vector residual_history;
  /// Energy functional 0.5 x_kᵀ A x_k - bᵀ x_k; non-increasing in exact arithmetic.
  Vector energy_history;
};

/// Thrown when PCG hits max_iter or produces non-finite values. Carries the partial result.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, PcgResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const PcgResult& partial() const noexcept { return partial_; }

 private:
  PcgResult partial_;
};

/// Preconditioned conjugate gradient from x0 = 0 with M^{-1} r = L^{-T} L^{-1} r.
///
/// `precond == nullptr` runs plain CG. Stops on the true residual, recomputed
/// every iteration.
PcgResult pcg(const CsrMatrix& a, std::span<const double> b, const LowerFactor* precond,
              const PcgOptions& options = {});

}  // namespace icopt
