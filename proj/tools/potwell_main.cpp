#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "potwell/experiment.hpp"

using namespace potwell;

int main(int argc, char** argv) {
  CLI::App app{"potwell: potential-well laboratory for the mass-conserving "
               "mixed pseudo-parabolic p-Laplacian equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "optimizer / profile seed (overrides config)");
    sub->add_option("--workers", workers, "sweep worker count (overrides config)");
  };

  CLI::App* wells = app.add_subcommand("wells", "compute well constants (C*, d, b, d(delta))");
  CLI::App* classify = app.add_subcommand("classify", "classify initial data against the theorem regimes");
  CLI::App* run = app.add_subcommand("run", "integrate a trajectory and verify the predicted regime");
  CLI::App* sweep = app.add_subcommand("sweep", "run a lambda sweep along one profile fiber");
  for (CLI::App* sub : {wells, classify, run, sweep}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage; // --help exits 0; any parse failure is usage
  }

  try {
    ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) {
      cfg.wells_opt.seed = *seed;
      cfg.profile.seed = *seed;
    }
    if (workers) cfg.workers = *workers;

    if (wells->parsed()) return cmd_wells(cfg);
    if (classify->parsed()) return cmd_classify(cfg);
    if (run->parsed()) return cmd_run(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
