#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "potwell/analysis.hpp"

namespace potwell {

// exit codes shared by all subcommands
inline constexpr int kExitOk = 0;
inline constexpr int kExitIndeterminate = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitOptimizerWarning = 3;
inline constexpr int kExitInconsistent = 4;

/// Initial-profile spec: cosine mode, mean-projected gaussian bump, or a
/// seeded smooth random field.
struct ProfileSpec {
  std::string kind = "cos_mode"; // cos_mode | gaussian | random
  int kx = 1, ky = 0;
  std::vector<double> center{0.5, 0.5};
  double width = 0.1;
  std::uint64_t seed = 7;
};

struct ScalingSpec {
  std::optional<double> lambda;       // explicit scale
  std::optional<Regime> target;       // or a fiber-scaled regime target
};

struct ExperimentConfig {
  Params params;
  std::vector<double> extents{1.0};
  std::vector<int> counts{256};
  ProfileSpec profile;
  ScalingSpec scaling;
  SolverConfig solver;
  OptimizerSettings wells_opt;
  double tol_d = 1e-3;
  std::vector<double> sweep_lambdas;
  std::string out_dir = "out";
  int workers = 4;

  static ExperimentConfig from_json_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);

  Grid make_grid() const;
  Field make_profile(const Grid& grid) const;
  Field make_u0(const Grid& grid, const WellConstants& wells) const;
};

int cmd_wells(const ExperimentConfig& cfg);
int cmd_classify(const ExperimentConfig& cfg);
int cmd_run(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);

} // namespace potwell
