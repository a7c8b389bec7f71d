#pragma once

#include <string>
#include <utility>
#include <vector>

#include "potwell/functionals.hpp"
#include "potwell/grid.hpp"
#include "potwell/params.hpp"

namespace potwell {

enum class Scheme { euler, heun };
enum class Termination { horizon_reached, blowup_detected, step_floor_hit };

const char* to_string(Scheme s);
const char* to_string(Termination t);

struct SolverConfig {
  double dt0 = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::euler;
  double eps_reg = -1.0;          // < 0: auto, 1e-8 * max face gradient of u0 when p < 2
  bool adapt = true;
  double dt_min = 1e-15;
  double dt_max = 1e-2;
  double step_tol = 1e-3;         // relative per-step change target (H1 norm)
  double blowup_threshold = 1e6;  // max-norm cutoff
  int snapshot_stride = 0;        // 0: initial + final only

  void validate() const;          // throws std::invalid_argument
};

/// Time series of per-step scalar diagnostics plus sparse Field snapshots.
/// Index 0 is the initial state. D is the cumulative dissipation
/// sum of |u_tau|_{H1}^2 * dt over accepted steps (backward difference
/// quotient); non-decreasing by construction.
struct Trajectory {
  Params params;
  Grid grid;
  SolverConfig config;

  std::vector<double> times, dts, J, I, h1_norm_sq, grad_p_norm_p, mass, D;
  std::vector<std::pair<int, Field>> snapshots; // (step index, field)
  Termination termination = Termination::horizon_reached;
  double eps_reg_used = 0.0;

  int steps() const { return static_cast<int>(times.size()); }
  double h1_0() const { return h1_norm_sq.front(); }
  const Field& final_state() const { return snapshots.back().second; }
};

/// f(u) = |u|^{q-1}u - avg(|u|^{q-1}u); mean-zero to roundoff.
Field source(const Field& u, const Params& params);

/// One explicit step of u_t = (I - Lap)^{-1}(Lap_p u + f(u)); Euler or Heun
/// (trapezoidal average of two slopes). Result re-projected to mean zero.
/// A non-finite result signals blowup-or-instability to the driver, not a crash.
Field step(const Field& u, double dt, const SolverConfig& cfg, const Params& params,
           const HelmholtzSolver& helm);

/// Integrates until t_end, the blowup threshold, or the dt floor; records all
/// scalar diagnostics each accepted step. Adaptivity: halve dt on relative
/// change > step_tol or an instability signal, grow by 1.25 when < step_tol/4,
/// clamped to [dt_min, dt_max].
Trajectory run(const Field& u0, const SolverConfig& cfg, const Params& params);

// Trajectory scalar series as CSV: header t,dt,J,I,h1_norm_sq,grad_p_norm_p,mass,D
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

} // namespace potwell
