#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "icopt/problem.hpp"
#include "icopt/sparse.hpp"

namespace icopt {

/// Which Frobenius objective the probes estimate.
///
///   unweighted: ||L Lᵀ - A||_F^2       sampled as ||L Lᵀ z - A z||^2, z ~ N(0, I)
///   weighted:   ||(L Lᵀ - A) A^{-1}||_F^2  sampled as ||L Lᵀ x - b||^2, x = A^{-1} b
enum class LossKind { unweighted, weighted };

std::string_view to_string(LossKind kind);
LossKind loss_kind_from_string(std::string_view name);

/// ||L (Lᵀ v) - t||^2 using two sparse products; L Lᵀ is never formed.
double loss_probe(const LowerFactor& l, std::span<const double> v, std::span<const double> t);

/// Gradient of loss_probe with respect to the stored entries of L, aligned with l.values().
///
/// With u = Lᵀ v and r = L u - t, the full gradient is 2 (r uᵀ + v (Lᵀ r)ᵀ);
/// only the entries inside L's pattern are evaluated.
Vector loss_gradient_probe(const LowerFactor& l, std::span<const double> v, std::span<const double> t);

/// Accumulates loss_probe's gradient into `grad` and returns the probe loss.
double accumulate_probe(const LowerFactor& l, std::span<const double> v, std::span<const double> t,
                        std::span<double> grad);

struct TrainConfig {
  double step_size = 1e-3;
  std::size_t batch_size = 512;
  std::size_t epochs = 10000;
  std::uint64_t seed = 0;
  double diag_floor = 1e-8;
  LossKind loss = LossKind::weighted;
  /// Descent runs in the coordinates of the rescaled system s*A (factor sqrt(s)*L,
  /// solutions x/s); the factor is stored and returned in A's units.
  double system_scale = 1.0;

  void validate() const;
};

struct TrainReport {
  LowerFactor factor;
  /// Batch-mean loss per epoch divided by the epoch-0 value; history[0] == 1.
  Vector history;
  /// Unnormalized epoch-0 batch-mean loss.
  double initial_loss = 0.0;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::size_t floor_activations = 0;
};

/// Raised when the batch loss becomes non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch)
      : std::runtime_error("training diverged: non-finite loss at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Plain fixed-step gradient descent on the entries of `initial`.
///
/// Each epoch samples `batch_size` probe indices with replacement, averages the
/// per-probe gradients (summed in ascending batch position), takes one step
/// L <- L - step_size * grad, then raises any diagonal entry below diag_floor
/// to diag_floor. The recorded loss is the batch mean before the step.
///
/// With system_scale s != 1, a step of size `step_size` on the rescaled
/// problem is an A-unit step of step_size*s (unweighted) or step_size/s
/// (weighted), and the floor becomes diag_floor/sqrt(s). The weighted loss is
/// scale invariant; the unweighted one scales by s^2 and cancels in the
/// normalized history.
TrainReport train(const CsrMatrix& a, const LowerFactor& initial, const ProbeSet& probes,
                  const TrainConfig& cfg);

}  // namespace icopt
