// Command-line driver: generate a problem bundle, train factors, solve, report.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "icopt/experiment.hpp"

namespace {

void print_written(const std::filesystem::path& dir, const std::vector<std::string>& names) {
  for (const auto& name : names) std::cout << (dir / name).string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train and evaluate IC(0) preconditioner factors on a finite-volume diffusion problem"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> field_seed, probe_seed, train_seed;
  std::optional<std::size_t> grid, epochs;
  auto* generate = app.add_subcommand("generate", "Build A, the coefficient field and the probe set");
  generate->add_option("-c,--config", config_path, "Experiment config (JSON); defaults apply when omitted")
      ->check(CLI::ExistingFile);
  generate->add_option("-o,--out", out_dir, "Run directory (overrides output_dir)");
  generate->add_option("--grid", grid, "Cells per axis");
  generate->add_option("--field-seed", field_seed, "Seed of the random coefficient field");
  generate->add_option("--probe-seed", probe_seed, "Seed of the probe right-hand sides");
  generate->add_option("--epochs", epochs, "Training epochs for both objectives");
  generate->add_option("--train-seed", train_seed, "Batch-sampling seed for both objectives");

  std::string run_dir;
  std::string loss = "weighted";
  auto* train = app.add_subcommand("train", "Run IC(0) and gradient training on one objective");
  train->add_option("run", run_dir, "Run directory created by generate")->required();
  train->add_option("-l,--loss", loss, "Objective")->check(CLI::IsMember({"unweighted", "weighted"}));

  std::string factor = "ic0";
  std::size_t probe = 0;
  auto* solve = app.add_subcommand("solve", "PCG on one probe right-hand side");
  solve->add_option("run", run_dir, "Run directory")->required();
  solve->add_option("-f,--factor", factor, "Preconditioner")
      ->check(CLI::IsMember({"none", "ic0", "unweighted", "weighted"}));
  solve->add_option("-p,--probe", probe, "Probe index");

  auto* report = app.add_subcommand("report", "Condition numbers, spectra, CG histories and loss curves");
  report->add_option("run", run_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      icopt::ExperimentConfig config;
      if (!config_path.empty()) config = icopt::load_config(config_path);
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (grid) config.grid = *grid;
      if (field_seed) config.field_seed = *field_seed;
      if (probe_seed) config.probe_seed = *probe_seed;
      if (epochs) config.unweighted.epochs = config.weighted.epochs = *epochs;
      if (train_seed) config.unweighted.seed = config.weighted.seed = *train_seed;
      print_written(config.output_dir, icopt::cmd_generate(config));
    } else if (*train) {
      print_written(run_dir, icopt::cmd_train(run_dir, icopt::loss_kind_from_string(loss)));
    } else if (*solve) {
      print_written(run_dir, icopt::cmd_solve(run_dir, factor, probe));
    } else if (*report) {
      print_written(run_dir, icopt::cmd_report(run_dir));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
