#include "icopt/solver.hpp"

#include <cmath>

namespace icopt {

PcgResult pcg(const CsrMatrix& a, std::span<const double> b, const LowerFactor* precond,
              const PcgOptions& options) {
  const std::size_t n = a.n;
  if (b.size() != n) throw DimensionError("pcg: right-hand side length mismatch");
  if (precond) {
    if (precond->n() != n) throw DimensionError("pcg: preconditioner dimension mismatch");
    precond->check_positive_diagonal();
  }
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0)) {
    throw std::invalid_argument("pcg: rel_tol must lie in (0, 1)");
  }
  const std::size_t max_iter = options.max_iter ? options.max_iter : 10 * n;

  auto apply_precond = [&](const Vector& r) {
    return precond ? upper_solve(*precond, lower_solve(*precond, r)) : r;
  };

  PcgResult res;
  res.x.assign(n, 0.0);
  res.residual_history.push_back(1.0);
  res.energy_history.push_back(0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.residual_history[0] = 0.0;
    return res;
  }

  Vector r(b.begin(), b.end());
  Vector z = apply_precond(r);
  Vector p = z;
  double rz = dot(r, z);

  while (res.iterations < max_iter) {
    const Vector ap = spmv(a, p);
    const double pap = dot(p, ap);
    const double alpha = rz / pap;
    if (!std::isfinite(alpha) || !(pap > 0.0)) {
      throw ConvergenceError("pcg: breakdown (non-positive or non-finite curvature)", std::move(res));
    }
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    ++res.iterations;

    Vector ax = spmv(a, res.x);
    double energy = 0.0;
    Vector true_r(n);
    for (std::size_t i = 0; i < n; ++i) {
      true_r[i] = b[i] - ax[i];
      energy += 0.5 * res.x[i] * ax[i] - b[i] * res.x[i];
    }
    const double rel = norm2(true_r) / bnorm;
    if (!std::isfinite(rel)) throw ConvergenceError("pcg: non-finite residual", std::move(res));
    res.residual_history.push_back(rel);
    res.energy_history.push_back(energy);
    if (rel <= options.rel_tol) return res;

    z = apply_precond(r);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw ConvergenceError("pcg: no convergence within " + std::to_string(max_iter) + " iterations",
                         std::move(res));
}

}  // namespace icopt
