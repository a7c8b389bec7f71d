#include "potwell/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace potwell {

const char* to_string(Scheme s) { return s == Scheme::euler ? "euler" : "heun"; }

const char* to_string(Termination t) {
  switch (t) {
    case Termination::horizon_reached: return "horizon_reached";
    case Termination::blowup_detected: return "blowup_detected";
    case Termination::step_floor_hit: return "step_floor_hit";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(t_end > 0.0)) throw std::invalid_argument("SolverConfig: t_end must be positive");
  if (!(dt_min <= dt0 && dt0 <= dt_max))
    throw std::invalid_argument("SolverConfig: requires dt_min <= dt0 <= dt_max");
  if (!(blowup_threshold > 0.0))
    throw std::invalid_argument("SolverConfig: blowup_threshold must be positive");
  if (!(step_tol > 0.0)) throw std::invalid_argument("SolverConfig: step_tol must be positive");
  if (!(dt_min > 0.0)) throw std::invalid_argument("SolverConfig: dt_min must be positive");
}

Field source(const Field& u, const Params& params) {
  Field g(u.grid);
  for (int i = 0; i < u.size(); ++i) g.values[i] = signed_pow(u.values[i], params.q);
  const double m = mean(g);
  for (double& v : g.values) v -= m;
  return g;
}

namespace {

Field slope(const Field& u, double eps, const SolverConfig&, const Params& params,
            const HelmholtzSolver& helm) {
  Field rhs = p_laplacian(u, params.p, eps);
  const Field f = source(u, params);
  for (int i = 0; i < rhs.size(); ++i) rhs.values[i] += f.values[i];
  return helm.solve(rhs);
}

double pick_eps(const SolverConfig& cfg, const Params& params, const Field& u0) {
  if (cfg.eps_reg >= 0.0) return cfg.eps_reg;
  if (params.p >= 2.0) return 0.0;
  const FaceGradient fg = gradient(u0);
  double m = 0.0;
  for (const auto& c : fg.comp)
    for (double x : c) m = std::max(m, std::abs(x));
  return 1e-8 * std::max(1.0, m);
}

Field do_step(const Field& u, double dt, double eps, const SolverConfig& cfg,
              const Params& params, const HelmholtzSolver& helm) {
  Field s1 = slope(u, eps, cfg, params, helm);
  Field out = u;
  if (cfg.scheme == Scheme::euler) {
    for (int i = 0; i < out.size(); ++i) out.values[i] += dt * s1.values[i];
  } else {
    Field up = u;
    for (int i = 0; i < up.size(); ++i) up.values[i] += dt * s1.values[i];
    if (!all_finite(up)) return up; // predictor already unstable
    Field s2 = slope(up, eps, cfg, params, helm);
    for (int i = 0; i < out.size(); ++i)
      out.values[i] += 0.5 * dt * (s1.values[i] + s2.values[i]);
  }
  if (!all_finite(out)) return out;
  return project_zero_mean(out); // roundoff hygiene
}

} // namespace

Field step(const Field& u, double dt, const SolverConfig& cfg, const Params& params,
           const HelmholtzSolver& helm) {
  const double eps = pick_eps(cfg, params, u);
  return do_step(u, dt, eps, cfg, params, helm);
}

Trajectory run(const Field& u0, const SolverConfig& cfg, const Params& params) {
  params.validate();
  cfg.validate();

  Trajectory traj;
  traj.params = params;
  traj.grid = u0.grid;
  traj.config = cfg;
  traj.eps_reg_used = pick_eps(cfg, params, u0);

  HelmholtzSolver helm(u0.grid);
  Field u = project_zero_mean(u0);

  auto record = [&](double t, double dt, const Field& f, double Dacc) {
    const FunctionalReport r = evaluate(f, params);
    traj.times.push_back(t);
    traj.dts.push_back(dt);
    traj.J.push_back(r.J);
    traj.I.push_back(r.I);
    traj.h1_norm_sq.push_back(r.h1_norm_sq);
    traj.grad_p_norm_p.push_back(r.grad_p_norm_p);
    traj.mass.push_back(mean(f));
    traj.D.push_back(Dacc);
  };

  double t = 0.0, dt = cfg.dt0, Dacc = 0.0;
  int accepted = 0;
  record(t, 0.0, u, Dacc);
  traj.snapshots.emplace_back(0, u);

  const double h1_floor = 1e-300;
  traj.termination = Termination::horizon_reached;

  while (t < cfg.t_end - 1e-15 * cfg.t_end) {
    dt = std::min(dt, cfg.t_end - t);
    Field u1 = do_step(u, dt, traj.eps_reg_used, cfg, params, helm);

    const bool bad = !all_finite(u1);
    double rel = 0.0;
    if (!bad) {
      Field diff = u1;
      for (int i = 0; i < diff.size(); ++i) diff.values[i] -= u.values[i];
      const double hu = std::sqrt(std::max(h1_norm_sq(u), h1_floor));
      rel = std::sqrt(h1_norm_sq(diff)) / std::max(1e-14, hu);
    }

    if (cfg.adapt && (bad || rel > cfg.step_tol)) {
      if (dt > cfg.dt_min * (1.0 + 1e-12)) {
        dt = std::max(0.5 * dt, cfg.dt_min);
        continue; // rejected, retry smaller
      }
      // at the floor: distinguish blowup from stiffness failure
      traj.termination = bad ? Termination::blowup_detected : Termination::step_floor_hit;
      break;
    }
    if (!cfg.adapt && bad) {
      traj.termination = Termination::blowup_detected;
      break;
    }

    // accept
    Field diff = u1;
    for (int i = 0; i < diff.size(); ++i) diff.values[i] -= u.values[i];
    Dacc += h1_norm_sq(diff) / dt; // |u_tau|_{H1}^2 * dt with backward quotient
    u = std::move(u1);
    t += dt;
    ++accepted;
    record(t, dt, u, Dacc);

    if (max_norm(u) > cfg.blowup_threshold) {
      traj.termination = Termination::blowup_detected;
      break;
    }
    if (cfg.snapshot_stride > 0 && accepted % cfg.snapshot_stride == 0)
      traj.snapshots.emplace_back(accepted, u);
    if (cfg.adapt && rel < 0.25 * cfg.step_tol) dt = std::min(1.25 * dt, cfg.dt_max);
  }

  if (traj.snapshots.empty() || traj.snapshots.back().first != accepted)
    traj.snapshots.emplace_back(accepted, u);
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  os << "t,dt,J,I,h1_norm_sq,grad_p_norm_p,mass,D\n" << std::setprecision(17);
  for (int k = 0; k < traj.steps(); ++k)
    os << traj.times[k] << "," << traj.dts[k] << "," << traj.J[k] << "," << traj.I[k] << ","
       << traj.h1_norm_sq[k] << "," << traj.grad_p_norm_p[k] << "," << traj.mass[k] << ","
       << traj.D[k] << "\n";
}

} // namespace potwell
