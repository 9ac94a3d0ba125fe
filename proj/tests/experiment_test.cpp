#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "icopt/experiment.hpp"
#include "icopt/matrix_market.hpp"

namespace icopt {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config(const std::string& name) {
  ExperimentConfig c;
  c.grid = 6;
  c.probe_count = 40;
  c.unweighted.epochs = c.weighted.epochs = 60;
  c.unweighted.batch_size = c.weighted.batch_size = 16;
  c.histogram_bins = 8;
  c.output_dir = (fs::temp_directory_path() / ("icopt_test_" + name)).string();
  fs::remove_all(c.output_dir);
  return c;
}

TEST(ExperimentConfig, JsonRoundTripIsLossless) {
  ExperimentConfig c;
  c.grid = 17;
  c.corr_len = 0.123456789012345;
  c.target_contrast = 9.87654321;
  c.field_seed = 0xFFFFFFFFFFFFull;
  c.weighted.step_size = 3.3e-4;
  c.unweighted.diag_floor = 1e-9;
  c.histogram_scale = HistogramScale::linear;
  for (std::optional<double> scale : {std::optional<double>{}, std::optional<double>{0.001}}) {
    c.system_scale = scale;
    const nlohmann::json j = c;
    const ExperimentConfig back = nlohmann::json::parse(j.dump()).get<ExperimentConfig>();
    EXPECT_EQ(nlohmann::json(back), j);
    EXPECT_EQ(back.corr_len, c.corr_len);
    EXPECT_EQ(back.system_scale, c.system_scale);
  }
}

TEST(ExperimentConfig, DefaultsDescribeThe4096Problem) {
  const ExperimentConfig c;
  EXPECT_EQ(c.grid_spec().cells(), 4096u);
  EXPECT_EQ(c.probe_count, 1000u);
  EXPECT_EQ(c.weighted.step_size, 1e-3);
  EXPECT_EQ(c.weighted.batch_size, 512u);
  EXPECT_EQ(c.weighted.epochs, 10000u);
  const CsrMatrix a = assemble_fvm(c.grid_spec(), gaussian_random_field(c.grid_spec(), c.field_seed, c.corr_len, 10.0));
  EXPECT_EQ(a.n, 4096u);
  EXPECT_DOUBLE_EQ(c.train_config(LossKind::unweighted).system_scale, 1.0 / 4096.0);
  EXPECT_DOUBLE_EQ(c.train_config(LossKind::weighted).system_scale, 1.0 / 64.0);
}

TEST(Generate, SmokeBundleLoadsBackAndIsDeterministic) {
  ExperimentConfig c = small_config("generate");
  c.grid = 4;
  cmd_generate(c);
  const Problem p = build_problem(c);
  const CsrMatrix a = read_matrix_market(fs::path(c.output_dir) / "A.mtx");
  EXPECT_EQ(a.values, p.a.values);
  EXPECT_EQ(a.col_idx, p.a.col_idx);
  const auto probes = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "probes.json"));
  EXPECT_EQ(probes.at("probes").get<std::vector<Vector>>(), p.probes.probes);
  EXPECT_EQ(probes.at("solutions").get<std::vector<Vector>>(), *p.probes.solutions);
  const auto coeff = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "coefficient.json"));
  EXPECT_EQ(coeff.at("k").get<Vector>(), p.field.k);

  const std::string manifest = slurp(fs::path(c.output_dir) / "manifest.json");
  cmd_generate(c);
  EXPECT_EQ(slurp(fs::path(c.output_dir) / "manifest.json"), manifest);
}

TEST(Train, ZeroStepReproducesIc0FileAndWeightedLossDrops) {
  ExperimentConfig c = small_config("train");
  c.unweighted.step_size = 0.0;
  cmd_generate(c);
  const fs::path dir = c.output_dir;
  cmd_train(dir, LossKind::unweighted);
  EXPECT_EQ(slurp(dir / "factor_unweighted.mtx"), slurp(dir / "ic0.mtx"));

  cmd_train(dir, LossKind::weighted);
  const auto report = nlohmann::json::parse(slurp(dir / "train_weighted.json"));
  const auto history = report.at("history").get<Vector>();
  ASSERT_EQ(history.size(), 60u);
  EXPECT_EQ(history.front(), 1.0);
  EXPECT_LT(history.back(), 1.0);
  EXPECT_EQ(report.at("seed").get<std::uint64_t>(), c.weighted.seed);
}

TEST(Train, WeightedWithoutSolutionsFailsClearly) {
  ExperimentConfig c = small_config("nosol");
  cmd_generate(c);
  const fs::path dir = c.output_dir;
  auto probes = nlohmann::json::parse(slurp(dir / "probes.json"));
  probes["solutions"] = nullptr;
  std::ofstream(dir / "probes.json") << probes.dump();
  Manifest m = Manifest::load(dir);
  m.record("probes.json");
  m.save();
  try {
    cmd_train(dir, LossKind::weighted);
    FAIL() << "expected failure";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("solutions"), std::string::npos);
  }
}

TEST(Manifest, DetectsMutatedArtifact) {
  ExperimentConfig c = small_config("mutate");
  cmd_generate(c);
  const fs::path dir = c.output_dir;
  std::ofstream(dir / "A.mtx", std::ios::app) << "% tampered\n";
  try {
    cmd_train(dir, LossKind::weighted);
    FAIL() << "expected checksum failure";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("A.mtx"), std::string::npos);
  }
}

TEST(Sha256, KnownDigest) {
  const fs::path p = fs::temp_directory_path() / "icopt_sha_abc";
  std::ofstream(p, std::ios::binary) << "abc";
  EXPECT_EQ(sha256_file(p), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Report, IdentitySystemHasUnitKappa) {
  const CsrMatrix a = CsrMatrix::identity(5);
  const LowerFactor id = LowerFactor::identity(5);
  const auto results = evaluate_methods(a, {{"A", nullptr}, {"IC(0)", &id}}, Vector(5, 1.0), 1e-8);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(*results[0].kappa, 1.0);
  EXPECT_EQ(*results[1].kappa, 1.0);
  EXPECT_EQ(results[1].cg_iterations, 1u);
}

TEST(Report, AboveDenseLimitFallsBackToIterations) {
  const CsrMatrix a = CsrMatrix::identity(5);
  const auto results = evaluate_methods(a, {{"A", nullptr}}, Vector(5, 1.0), 1e-8, 4);
  EXPECT_FALSE(results[0].kappa.has_value());
  EXPECT_EQ(results[0].cg_iterations, 1u);
}

TEST(Report, FullPipelineOutputs) {
  ExperimentConfig c = small_config("report");
  cmd_generate(c);
  const fs::path dir = c.output_dir;
  cmd_train(dir, LossKind::unweighted);
  cmd_train(dir, LossKind::weighted);
  cmd_solve(dir, "weighted", 3);
  cmd_report(dir);

  std::istringstream table(slurp(dir / "table1.csv"));
  std::string header, kappa, iters;
  std::getline(table, header);
  std::getline(table, kappa);
  std::getline(table, iters);
  EXPECT_EQ(header, "metric,A,Frobenius,Weighted Frobenius,IC(0)");
  EXPECT_EQ(kappa.rfind("kappa,", 0), 0u);
  EXPECT_EQ(iters.rfind("cg_iterations,", 0), 0u);

  for (const char* panel : {"none", "weighted", "ic0", "unweighted"}) {
    std::istringstream hist(slurp(dir / (std::string("hist_") + panel + ".csv")));
    std::string line;
    std::getline(hist, line);
    EXPECT_EQ(line, "bin_lo,bin_hi,count");
    std::size_t total = 0;
    while (std::getline(hist, line)) total += std::stoul(line.substr(line.rfind(',') + 1));
    EXPECT_EQ(total, 36u) << panel;
    EXPECT_TRUE(fs::exists(dir / (std::string("cg_") + panel + ".csv")));
  }
  EXPECT_EQ(slurp(dir / "loss_history.csv").rfind("epoch,unweighted,weighted\n", 0), 0u);
  EXPECT_EQ(slurp(dir / "solve_weighted_3.csv").rfind("iteration,rel_residual\n", 0), 0u);
  EXPECT_NO_THROW(Manifest::load(dir).verify());
}

}  // namespace
}  // namespace icopt
