#include "potwell/experiment.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace potwell {

namespace {

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::invalid_argument("output directory not writable: " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << text;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["params"] = {{"p", c.params.p}, {"q", c.params.q}, {"dim", c.params.dim}};
  j["grid"] = {{"extents", c.extents}, {"counts", c.counts}};
  json prof{{"kind", c.profile.kind}};
  if (c.profile.kind == "cos_mode") {
    prof["kx"] = c.profile.kx;
    prof["ky"] = c.profile.ky;
  } else if (c.profile.kind == "gaussian") {
    prof["center"] = c.profile.center;
    prof["width"] = c.profile.width;
  } else {
    prof["seed"] = c.profile.seed;
  }
  j["profile"] = prof;
  json scal;
  if (c.scaling.lambda) scal["lambda"] = *c.scaling.lambda;
  if (c.scaling.target) scal["target"] = to_string(*c.scaling.target);
  j["scaling"] = scal;
  j["solver"] = {{"dt0", c.solver.dt0},
                 {"t_end", c.solver.t_end},
                 {"scheme", to_string(c.solver.scheme)},
                 {"eps_reg", c.solver.eps_reg},
                 {"adapt", c.solver.adapt},
                 {"dt_min", c.solver.dt_min},
                 {"dt_max", c.solver.dt_max},
                 {"step_tol", c.solver.step_tol},
                 {"blowup_threshold", c.solver.blowup_threshold},
                 {"snapshot_stride", c.solver.snapshot_stride}};
  j["wells"] = {{"starts", c.wells_opt.starts},
                {"max_iters", c.wells_opt.max_iters},
                {"tol", c.wells_opt.tol},
                {"seed", c.wells_opt.seed},
                {"smooth_passes", c.wells_opt.smooth_passes}};
  j["tol_d"] = c.tol_d;
  j["sweep_lambdas"] = c.sweep_lambdas;
  j["out"] = c.out_dir;
  j["workers"] = c.workers;
  return j;
}

bool optimizer_warned(const WellConstants& wc) {
  return !wc.cstar_estimate.provenance.converged || !wc.depth_provenance.converged;
}

// classify with a lambda_alpha estimate supplied on demand for J0 > d, I0 > 0 data
RegimeReport classify_full(const Field& u0, const ExperimentConfig& cfg,
                           const WellConstants& wells) {
  RegimeReport first = classify(u0, cfg.params, wells, cfg.tol_d);
  if (first.predicted == Regime::indeterminate && first.J0 > wells.d && first.I0 > 0.0 &&
      first.h1_0 > 1e-28) {
    try {
      const Grid grid = u0.grid;
      LambdaAlphaEstimate la = estimate_lambda_alpha(grid, cfg.params, first.J0, cfg.wells_opt);
      return classify(u0, cfg.params, wells, cfg.tol_d, la.value);
    } catch (const std::runtime_error&) {
      return first; // no Nehari point found below J0: stays indeterminate
    }
  }
  return first;
}

struct RunOutputs {
  RegimeReport report;
  Trajectory traj;
  std::optional<BlowupDiagnostics> diag;
};

RunOutputs run_and_verify(const Field& u0, const ExperimentConfig& cfg,
                          const WellConstants& wells) {
  RunOutputs out;
  out.report = classify_full(u0, cfg, wells);
  out.traj = run(u0, cfg.solver, cfg.params);
  if (out.traj.termination == Termination::blowup_detected && out.traj.steps() >= 10)
    out.diag = blowup_diagnostics(out.traj, cfg.params);
  verify(out.report, out.traj, out.diag);
  return out;
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const Trajectory& traj, const RegimeReport& report) {
  json j;
  j["config"] = config_json(cfg);
  j["termination"] = to_string(traj.termination);
  j["eps_reg_used"] = traj.eps_reg_used;
  j["steps"] = traj.steps() - 1;
  j["final"] = {{"t", traj.times.back()},
                {"J", traj.J.back()},
                {"I", traj.I.back()},
                {"h1_norm_sq", traj.h1_norm_sq.back()},
                {"grad_p_norm_p", traj.grad_p_norm_p.back()},
                {"mass", traj.mass.back()},
                {"D", traj.D.back()}};
  j["verdict"] = to_string(report.verdict);
  write_text(path, j.dump(2));
}

int verdict_exit(const RegimeReport& r, bool warned) {
  if (r.verdict == Verdict::inconsistent) return kExitInconsistent;
  if (warned) return kExitOptimizerWarning;
  if (r.verdict == Verdict::indeterminate) return kExitIndeterminate;
  return kExitOk;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json_text(ss.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  if (j.contains("params")) {
    const auto& p = j["params"];
    c.params.p = p.value("p", c.params.p);
    c.params.q = p.value("q", c.params.q);
    c.params.dim = p.value("dim", c.params.dim);
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.contains("extents")) c.extents = g["extents"].get<std::vector<double>>();
    if (g.contains("counts")) c.counts = g["counts"].get<std::vector<int>>();
  }
  if (j.contains("profile")) {
    const auto& p = j["profile"];
    c.profile.kind = p.value("kind", c.profile.kind);
    c.profile.kx = p.value("kx", c.profile.kx);
    c.profile.ky = p.value("ky", c.profile.ky);
    if (p.contains("center")) c.profile.center = p["center"].get<std::vector<double>>();
    c.profile.width = p.value("width", c.profile.width);
    c.profile.seed = p.value("seed", c.profile.seed);
  }
  if (j.contains("scaling")) {
    const auto& s = j["scaling"];
    if (s.contains("lambda")) c.scaling.lambda = s["lambda"].get<double>();
    if (s.contains("target")) c.scaling.target = regime_from_string(s["target"].get<std::string>());
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    c.solver.dt0 = s.value("dt0", c.solver.dt0);
    c.solver.t_end = s.value("t_end", c.solver.t_end);
    if (s.contains("scheme")) {
      const std::string sc = s["scheme"].get<std::string>();
      if (sc == "euler")
        c.solver.scheme = Scheme::euler;
      else if (sc == "heun")
        c.solver.scheme = Scheme::heun;
      else
        throw std::invalid_argument("unknown scheme: " + sc);
    }
    c.solver.eps_reg = s.value("eps_reg", c.solver.eps_reg);
    c.solver.adapt = s.value("adapt", c.solver.adapt);
    c.solver.dt_min = s.value("dt_min", c.solver.dt_min);
    c.solver.dt_max = s.value("dt_max", c.solver.dt_max);
    c.solver.step_tol = s.value("step_tol", c.solver.step_tol);
    c.solver.blowup_threshold = s.value("blowup_threshold", c.solver.blowup_threshold);
    c.solver.snapshot_stride = s.value("snapshot_stride", c.solver.snapshot_stride);
  }
  if (j.contains("wells")) {
    const auto& w = j["wells"];
    c.wells_opt.starts = w.value("starts", c.wells_opt.starts);
    c.wells_opt.max_iters = w.value("max_iters", c.wells_opt.max_iters);
    c.wells_opt.tol = w.value("tol", c.wells_opt.tol);
    c.wells_opt.seed = w.value("seed", c.wells_opt.seed);
    c.wells_opt.smooth_passes = w.value("smooth_passes", c.wells_opt.smooth_passes);
  }
  c.tol_d = j.value("tol_d", c.tol_d);
  if (j.contains("sweep_lambdas")) c.sweep_lambdas = j["sweep_lambdas"].get<std::vector<double>>();
  c.out_dir = j.value("out", c.out_dir);
  c.workers = j.value("workers", c.workers);
  return c;
}

Grid ExperimentConfig::make_grid() const {
  params.validate();
  if (params.dim == 1) {
    if (extents.size() < 1 || counts.size() < 1)
      throw std::invalid_argument("grid spec: needs one extent and one count for dim 1");
    return Grid::interval(extents[0], counts[0]);
  }
  if (extents.size() < 2 || counts.size() < 2)
    throw std::invalid_argument("grid spec: needs two extents and two counts for dim 2");
  return Grid::rectangle(extents[0], extents[1], counts[0], counts[1]);
}

Field ExperimentConfig::make_profile(const Grid& grid) const {
  if (profile.kind == "cos_mode") return cosine_mode(grid, profile.kx, profile.ky);
  if (profile.kind == "random") return random_smooth_field(grid, profile.seed);
  if (profile.kind == "gaussian") {
    Field f(grid);
    const double w2 = 2.0 * profile.width * profile.width;
    if (grid.dim == 1) {
      const double cx = profile.center.at(0);
      for (int i = 0; i < grid.counts[0]; ++i) {
        const double dx = grid.x(i) - cx;
        f.values[i] = std::exp(-dx * dx / w2);
      }
    } else {
      const double cx = profile.center.at(0), cy = profile.center.at(1);
      for (int iy = 0; iy < grid.counts[1]; ++iy)
        for (int ix = 0; ix < grid.counts[0]; ++ix) {
          const double dx = grid.x(ix) - cx, dy = grid.y(iy) - cy;
          f[grid.index(ix, iy)] = std::exp(-(dx * dx + dy * dy) / w2);
        }
    }
    return project_zero_mean(f); // initial data must carry zero mass
  }
  throw std::invalid_argument("unknown profile kind: " + profile.kind);
}

Field ExperimentConfig::make_u0(const Grid& grid, const WellConstants& wells) const {
  Field prof = make_profile(grid);
  if (scaling.target) return make_initial_data(prof, *scaling.target, params, wells);
  const double lam = scaling.lambda.value_or(1.0);
  for (double& v : prof.values) v *= lam;
  return prof;
}

int cmd_wells(const ExperimentConfig& cfg) {
  cfg.params.validate();
  ensure_out_dir(cfg.out_dir);
  const Grid grid = cfg.make_grid();
  WellConstants wc = compute_well_constants(grid, cfg.params, cfg.wells_opt);
  write_text(cfg.out_dir + "/wells.json", well_constants_to_json(wc));
  std::cout << "cstar = " << wc.cstar << ", d = " << wc.d << ", b = " << wc.b
            << " -> " << cfg.out_dir << "/wells.json\n";
  return optimizer_warned(wc) ? kExitOptimizerWarning : kExitOk;
}

int cmd_classify(const ExperimentConfig& cfg) {
  cfg.params.validate();
  ensure_out_dir(cfg.out_dir);
  const Grid grid = cfg.make_grid();
  WellConstants wc = compute_well_constants(grid, cfg.params, cfg.wells_opt);
  const Field u0 = cfg.make_u0(grid, wc);
  RegimeReport rep = classify_full(u0, cfg, wc);
  write_text(cfg.out_dir + "/report.json", regime_report_to_json(rep));
  write_text(cfg.out_dir + "/report.txt", regime_report_summary(rep));
  std::cout << regime_report_summary(rep);
  return optimizer_warned(wc) ? kExitOptimizerWarning : kExitOk;
}

int cmd_run(const ExperimentConfig& cfg) {
  cfg.params.validate();
  cfg.solver.validate();
  ensure_out_dir(cfg.out_dir);
  const Grid grid = cfg.make_grid();
  WellConstants wc = compute_well_constants(grid, cfg.params, cfg.wells_opt);
  const Field u0 = cfg.make_u0(grid, wc);

  RunOutputs out = run_and_verify(u0, cfg, wc);
  write_trajectory_csv(out.traj, cfg.out_dir + "/trajectory.csv");
  for (const auto& [idx, f] : out.traj.snapshots)
    write_field(f, cfg.out_dir + "/snap_" + std::to_string(idx) + ".field");
  write_manifest(cfg.out_dir + "/manifest.json", cfg, out.traj, out.report);
  write_text(cfg.out_dir + "/report.json", regime_report_to_json(out.report));
  write_text(cfg.out_dir + "/report.txt", regime_report_summary(out.report));
  if (out.diag)
    write_text(cfg.out_dir + "/blowup.json", blowup_diagnostics_to_json(*out.diag));
  std::cout << regime_report_summary(out.report);
  return verdict_exit(out.report, optimizer_warned(wc));
}

int cmd_sweep(const ExperimentConfig& cfg) {
  cfg.params.validate();
  cfg.solver.validate();
  if (cfg.sweep_lambdas.empty())
    throw std::invalid_argument("sweep: empty lambda grid (set sweep_lambdas)");
  ensure_out_dir(cfg.out_dir);
  const Grid grid = cfg.make_grid();
  WellConstants wc = compute_well_constants(grid, cfg.params, cfg.wells_opt);
  const Field prof = cfg.make_profile(grid);

  const int n = static_cast<int>(cfg.sweep_lambdas.size());
  std::vector<RunOutputs> results(n);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= n) break;
      Field u0 = prof;
      for (double& v : u0.values) v *= cfg.sweep_lambdas[k];
      results[k] = run_and_verify(u0, cfg, wc);
    }
  };
  const int nw = std::max(1, std::min(cfg.workers, n));
  std::vector<std::thread> pool;
  for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ostringstream os;
  os << "lambda,J0,I0,predicted,termination,verdict,decay_rate,decay_r_squared,blowup_time\n";
  os << std::setprecision(17);
  bool any_inconsistent = false;
  for (int k = 0; k < n; ++k) {
    const RegimeReport& r = results[k].report;
    any_inconsistent |= r.verdict == Verdict::inconsistent;
    os << cfg.sweep_lambdas[k] << "," << r.J0 << "," << r.I0 << "," << to_string(r.predicted)
       << "," << to_string(*r.observed_termination) << "," << to_string(r.verdict) << ","
       << (r.decay_rate ? std::to_string(*r.decay_rate) : "") << ","
       << (r.decay_r_squared ? std::to_string(*r.decay_r_squared) : "") << ","
       << (r.blowup_time ? std::to_string(*r.blowup_time) : "") << "\n";
  }
  write_text(cfg.out_dir + "/sweep.csv", os.str());
  std::cout << os.str();
  return any_inconsistent ? kExitInconsistent : kExitOk;
}

} // namespace potwell
