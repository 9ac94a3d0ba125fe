#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "icopt/objective.hpp"
#include "icopt/problem.hpp"
#include "icopt/spectral.hpp"

namespace icopt {

/// Everything needed to regenerate a run. Round-trips through JSON losslessly.
struct ExperimentConfig {
  std::size_t grid = 64;

  std::uint64_t field_seed = 1;
  double corr_len = 0.2;
  double target_contrast = 10.0;

  std::size_t probe_count = 1000;
  std::uint64_t probe_seed = 2;

  TrainConfig unweighted{.seed = 3, .loss = LossKind::unweighted};
  TrainConfig weighted{.seed = 4, .loss = LossKind::weighted};
  /// Training coordinates are system_scale * A; unset means default_system_scale per objective.
  std::optional<double> system_scale;

  double cg_tol = 1e-8;
  std::size_t cg_rhs_probe = 0;

  std::size_t histogram_bins = 40;
  HistogramScale histogram_scale = HistogramScale::log;

  std::string output_dir = "run";

  GridSpec grid_spec() const { return {grid, grid}; }
  TrainConfig train_config(LossKind kind) const;
  void validate() const;
};

/// h^2 (the cell-integrated operator) for the unweighted loss and h for the
/// weighted one. Plain gradient descent at step 1e-3 is stable on both up to
/// 64x64 with these choices; h^2 lets the weighted loss diverge at 64x64.
double default_system_scale(const GridSpec& grid, LossKind kind);

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);

/// The generated test problem held in memory.
struct Problem {
  GridSpec grid;
  CoefficientField field;
  CsrMatrix a;
  ProbeSet probes;  // with solutions
};

Problem build_problem(const ExperimentConfig& config);

/// One preconditioner under evaluation.
struct MethodResult {
  std::string label;
  std::optional<double> kappa;  // empty above the dense limit
  Vector spectrum;
  std::size_t cg_iterations = 0;
  Vector cg_residuals;
};

/// kappa, spectrum and a CG run (x0 = 0, same right-hand side) for each factor;
/// nullptr means no preconditioner.
std::vector<MethodResult> evaluate_methods(const CsrMatrix& a,
                                           const std::vector<std::pair<std::string, const LowerFactor*>>& methods,
                                           std::span<const double> rhs, double cg_tol,
                                           std::size_t dense_limit = kDenseSpectrumLimit);

/// SHA-256 of a file, lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

/// manifest.json: config, seeds, and a checksum per artifact in the run directory.
class Manifest {
 public:
  static Manifest load(const std::filesystem::path& dir);
  static Manifest create(const std::filesystem::path& dir, const ExperimentConfig& config);

  const ExperimentConfig& config() const noexcept { return config_; }

  /// Throws std::runtime_error naming the first artifact whose bytes no longer match.
  void verify() const;
  void require(const std::string& name) const;
  void record(const std::string& name);
  void save() const;

 private:
  std::filesystem::path dir_;
  ExperimentConfig config_;
  std::map<std::string, std::string> files_;
};

// CLI verbs. Each returns the artifact names it wrote, relative to the run directory.

std::vector<std::string> cmd_generate(const ExperimentConfig& config);
std::vector<std::string> cmd_train(const std::filesystem::path& dir, LossKind kind);
/// `factor` is one of none, ic0, unweighted, weighted.
std::vector<std::string> cmd_solve(const std::filesystem::path& dir, const std::string& factor,
                                   std::size_t probe_index);
std::vector<std::string> cmd_report(const std::filesystem::path& dir);

/// Column order of the condition-number table: A, Frobenius, Weighted Frobenius, IC(0).
inline const std::vector<std::string> kTableColumns{"A", "Frobenius", "Weighted Frobenius", "IC(0)"};

}  // namespace icopt
