#include "icopt/objective.hpp"

#include <cmath>

namespace icopt {

std::string_view to_string(LossKind kind) {
  return kind == LossKind::weighted ? "weighted" : "unweighted";
}

LossKind loss_kind_from_string(std::string_view name) {
  if (name == "weighted") return LossKind::weighted;
  if (name == "unweighted") return LossKind::unweighted;
  throw std::invalid_argument("unknown loss kind '" + std::string(name) + "'");
}

namespace {

void check_probe(const LowerFactor& l, std::span<const double> v, std::span<const double> t) {
  if (v.size() != l.n() || t.size() != l.n()) throw DimensionError("probe length does not match the factor");
}

}  // namespace

double loss_probe(const LowerFactor& l, std::span<const double> v, std::span<const double> t) {
  check_probe(l, v, t);
  const Vector u = spmv_transpose(l, v);
  const Vector w = spmv(l, u);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = w[i] - t[i];
    s += r * r;
  }
  return s;
}

double accumulate_probe(const LowerFactor& l, std::span<const double> v, std::span<const double> t,
                        std::span<double> grad) {
  check_probe(l, v, t);
  if (grad.size() != l.nnz()) throw DimensionError("gradient buffer does not match the factor pattern");
  const Vector u = spmv_transpose(l, v);
  Vector r = spmv(l, u);
  double loss = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] -= t[i];
    loss += r[i] * r[i];
  }
  const Vector s = spmv_transpose(l, r);
  const auto rp = l.row_ptr();
  const auto ci = l.col_idx();
  for (std::size_t i = 0; i < l.n(); ++i) {
    const double ri = r[i];
    const double vi = v[i];
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      const std::size_t j = ci[p];
      grad[p] += 2.0 * (ri * u[j] + vi * s[j]);
    }
  }
  return loss;
}

Vector loss_gradient_probe(const LowerFactor& l, std::span<const double> v, std::span<const double> t) {
  Vector grad(l.nnz(), 0.0);
  accumulate_probe(l, v, t, grad);
  return grad;
}

void TrainConfig::validate() const {
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) throw std::invalid_argument("step_size must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(diag_floor > 0.0)) throw std::invalid_argument("diag_floor must be > 0");
  if (!(system_scale > 0.0) || !std::isfinite(system_scale)) throw std::invalid_argument("system_scale must be > 0");
}

TrainReport train(const CsrMatrix& a, const LowerFactor& initial, const ProbeSet& probes,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (a.n != initial.n()) throw DimensionError("train: factor and matrix dimensions differ");
  if (probes.size() == 0) throw std::invalid_argument("train: empty probe set");
  if (cfg.loss == LossKind::weighted && !probes.has_solutions()) {
    throw std::invalid_argument("train: the weighted loss needs probe solutions (attach_solutions)");
  }
  const bool weighted = cfg.loss == LossKind::weighted;

  // Unweighted targets A z are fixed per probe, so compute them once.
  std::vector<Vector> targets;
  if (!weighted) {
    targets.reserve(probes.size());
    for (const auto& z : probes.probes) targets.push_back(spmv(a, z));
  }

  TrainReport report{initial, {}, 0.0, cfg.seed, 0, 0};
  report.history.reserve(cfg.epochs);
  LowerFactor& l = report.factor;
  Rng rng(cfg.seed);
  Vector grad(l.nnz());
  const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);
  const double step = weighted ? cfg.step_size / cfg.system_scale : cfg.step_size * cfg.system_scale;
  const double floor = cfg.system_scale == 1.0 ? cfg.diag_floor : cfg.diag_floor / std::sqrt(cfg.system_scale);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t k = 0; k < cfg.batch_size; ++k) {
      const std::size_t idx = rng.index(probes.size());
      if (weighted) {
        loss += accumulate_probe(l, (*probes.solutions)[idx], probes.probes[idx], grad);
      } else {
        loss += accumulate_probe(l, probes.probes[idx], targets[idx], grad);
      }
    }
    loss *= inv_batch;
    if (!std::isfinite(loss)) throw DivergenceError(epoch);

    if (epoch == 0) report.initial_loss = loss;
    const double norm = report.initial_loss > 0.0 ? report.initial_loss : 1.0;
    report.history.push_back(epoch == 0 ? 1.0 : loss / norm);

    auto values = l.values();
    for (std::size_t p = 0; p < values.size(); ++p) values[p] -= step * (grad[p] * inv_batch);
    for (std::size_t i = 0; i < l.n(); ++i) {
      double& d = values[l.diag_pos(i)];
      if (!(d >= floor)) {
        if (std::isnan(d)) throw DivergenceError(epoch);
        d = floor;
        ++report.floor_activations;
      }
    }
    ++report.epochs;
  }
  return report;
}

}  // namespace icopt
