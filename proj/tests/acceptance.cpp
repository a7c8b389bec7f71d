// Acceptance suite: property-based checks of the full pipeline at desk scale
// (1D, n = 256, q = 3, p in {2, 1.5}). Prints one PASS/FAIL line per criterion
// and exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "potwell/analysis.hpp"
#include "potwell/experiment.hpp"

using namespace potwell;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kN = 256;

struct Suite {
  std::vector<std::pair<bool, std::string>> results;
  std::vector<Trajectory> trajectories; // every run feeds the mass criterion

  void report(int num, bool ok, const std::string& what) {
    results.emplace_back(ok, "criterion " + std::to_string(num) + ": " +
                                 (ok ? "PASS" : "FAIL") + " - " + what);
  }
};

Params make_params(double p) {
  Params params;
  params.p = p;
  params.q = 3.0;
  return params;
}

Field scaled_cos(const Grid& g, double amp) {
  Field u(g);
  for (int i = 0; i < g.counts[0]; ++i) u.values[i] = amp * std::cos(kPi * g.x(i));
  return project_zero_mean(u);
}

OptimizerSettings opt_budget() {
  OptimizerSettings o;
  o.starts = 6;
  o.max_iters = 3000;
  return o;
}

// J(lambda * v) = target on the chosen monotone branch of the fiber
Field fiber_scale_to(const Field& v, const Params& params, double target, bool left_branch) {
  const double F = grad_norm_p_pow(v, params.p);
  const double G = lp_norm_pow(v, params.q + 1.0);
  auto J = [&](double lam) {
    return std::pow(lam, params.p) * F / params.p -
           std::pow(lam, params.q + 1.0) * G / (params.q + 1.0);
  };
  const double lstar = std::pow(F / G, 1.0 / (params.q + 1.0 - params.p));
  double lo, hi;
  if (left_branch) {
    lo = 0.0;
    hi = lstar;
  } else {
    lo = lstar;
    hi = 2.0 * lstar;
    while (J(hi) > target) hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((J(mid) < target) == left_branch)
      lo = mid;
    else
      hi = mid;
  }
  const double lam = 0.5 * (lo + hi);
  Field out = v;
  for (double& x : out.values) x *= lam;
  return out;
}

// --- criterion 2: energy identity -------------------------------------------

double energy_residual(Suite& s, const Grid& g, const Params& params, double dt) {
  SolverConfig cfg;
  cfg.dt0 = dt;
  cfg.dt_max = dt;
  cfg.adapt = false;
  cfg.t_end = 1.0;
  Trajectory traj = run(scaled_cos(g, 0.1), cfg, params);
  const double res = std::abs(traj.D.back() + traj.J.back() - traj.J.front());
  s.trajectories.push_back(std::move(traj));
  return res;
}

void criterion_energy_identity(Suite& s, const Grid& g) {
  const Params params = make_params(2.0);
  const double J0 = evaluate(scaled_cos(g, 0.1), params).J;
  const double r1 = energy_residual(s, g, params, 1e-4);
  const double r2 = energy_residual(s, g, params, 5e-5);
  const bool ok = r1 <= 1e-3 * std::max(1.0, std::abs(J0)) && r1 / r2 >= 1.5;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "energy identity residual %.3e at dt 1e-4 (bound %.3e), halving ratio %.2f",
                r1, 1e-3 * std::max(1.0, std::abs(J0)), r1 / r2);
  s.report(2, ok, buf);
}

// --- criterion 3: depth two-route + grid consistency ------------------------

void criterion_depth_routes(Suite& s, const WellConstants& wc2, const WellConstants& wc15) {
  bool ok = true;
  std::string detail;
  struct Case {
    double p;
    const WellConstants* wc;
  } cases[] = {{2.0, &wc2}, {1.5, &wc15}};
  for (const Case& c : cases) {
    const Params params = make_params(c.p);
    const double rel = std::abs(c.wc->d - c.wc->depth_direct_value) / c.wc->d;
    const double c128 = estimate_cstar(Grid::interval(1.0, 128), params, opt_budget()).cstar;
    const double c512 = estimate_cstar(Grid::interval(1.0, 512), params, opt_budget()).cstar;
    const double grid_rel = std::abs(c128 - c512) / c512;
    ok = ok && rel <= 0.01 && grid_rel <= 0.01;
    char buf[96];
    std::snprintf(buf, sizeof buf, "[p=%g: routes %.2e, grid %.2e] ", c.p, rel, grid_rel);
    detail += buf;
  }
  s.report(3, ok, "two-route depth and C* grid consistency within 1% " + detail);
}

// --- criterion 4: d(delta) shape and the lower bound ------------------------

void criterion_d_delta_shape(Suite& s, const WellConstants& wc2, const WellConstants& wc15) {
  bool ok = true;
  for (const auto* wc : {&wc2, &wc15}) {
    const Params params = make_params(wc == &wc2 ? 2.0 : 1.5);
    const double b = (params.q + 1.0) / params.p;
    ok = ok && wc->b == b;
    ok = ok && d_delta(wc->cstar, params, 1.0) == wc->d;
    ok = ok && std::abs(d_delta(wc->cstar, params, b)) <= 1e-14 * wc->d;
    double prev = 0.0;
    double prev_delta = 0.0;
    for (const auto& [delta, val] : wc->d_delta_curve) {
      if (delta <= 1.0 && val < prev) ok = false; // rises on (0, 1]
      if (delta > 1.0) {
        // across the peak, the reference is d itself, not the last pre-peak point
        const double ref = prev_delta > 1.0 ? prev : wc->d;
        if (val > ref + 1e-14 * wc->d) ok = false; // falls on (1, b]
      }
      prev = val;
      prev_delta = delta;
      if (delta <= 1.0) {
        // Lemma-type lower bound (equality for the closed form)
        const double rp = std::pow(r_of_delta(wc->cstar, params, delta), params.p);
        const double lower = (1.0 - delta) * rp / params.p +
                             (params.q + 1.0 - params.p) /
                                 (params.p * (params.q + 1.0)) * delta * rp;
        if (val < lower * (1.0 - 1e-12)) ok = false;
      }
    }
  }
  s.report(4, ok, "d(delta) unimodal with peak d at 1, root (q+1)/p, lower bound holds");
}

// --- criterion 5: fiber law --------------------------------------------------

void criterion_fiber_law(Suite& s, const Grid& g) {
  bool ok = true;
  std::mt19937_64 seeds(1618);
  for (double p : {2.0, 1.5}) {
    const Params params = make_params(p);
    for (int trial = 0; trial < 20; ++trial) {
      Field u = random_smooth_field(g, seeds());
      const double lstar = lambda_star(u, params);
      Field v = u;
      for (double& x : v.values) x *= lstar;
      const FunctionalReport r = evaluate(v, params);
      if (std::abs(r.I) > 1e-8 * r.grad_p_norm_p) ok = false;

      // J(lambda u) at 50 log-spaced lambda: unimodal, argmax next to lambda*
      const int m = 50;
      std::vector<double> js(m);
      int argmax = 0;
      for (int k = 0; k < m; ++k) {
        const double lam = lstar * std::pow(10.0, -1.0 + 2.0 * k / (m - 1.0));
        Field w = u;
        for (double& x : w.values) x *= lam;
        js[k] = evaluate(w, params).J;
        if (js[k] > js[argmax]) argmax = k;
      }
      for (int k = 1; k < m; ++k) {
        if (k <= argmax && js[k] < js[k - 1]) ok = false;
        if (k > argmax && js[k] > js[k - 1]) ok = false;
      }
      // lambda* sits at 10^0 on this grid: index (m-1)/2, allow one sample
      if (std::abs(argmax - (m - 1) / 2.0) > 1.0) ok = false;
    }
  }
  s.report(5, ok, "I(lambda* u) = 0 to 1e-8 and J(lambda u) unimodal about lambda*");
}

// --- criterion 6: subcritical decay ------------------------------------------

void criterion_t1_decay(Suite& s, const Grid& g) {
  const Params params = make_params(2.0);
  SolverConfig cfg;
  cfg.t_end = 20.0;
  Trajectory traj = run(scaled_cos(g, 0.1), cfg, params);

  bool ok = traj.termination == Termination::horizon_reached;
  for (double i : traj.I)
    if (!(i > 0.0)) ok = false;
  for (int k = 1; k < traj.steps(); ++k)
    if (!(traj.h1_norm_sq[k] < traj.h1_norm_sq[k - 1])) ok = false;
  DecayFit fit = decay_fit(traj, 0.5);
  ok = ok && fit.r_squared > 0.99;
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "0.1 cos run: I > 0, h1 strictly decreasing, fit rate %.4f r^2 %.6f",
                fit.rate, fit.r_squared);
  s.report(6, ok, buf);
  s.trajectories.push_back(std::move(traj));
}

// --- criterion 7: blowup with Levine concavity -------------------------------

void criterion_blowup(Suite& s, const Grid& g, const WellConstants& wc2,
                      const WellConstants& wc15) {
  bool ok = true;
  std::string detail;
  for (double p : {2.0, 1.5}) {
    const Params params = make_params(p);
    const WellConstants& wc = p == 2.0 ? wc2 : wc15;
    SolverConfig cfg;
    cfg.t_end = 10.0;
    Trajectory traj = run(scaled_cos(g, 4.0), cfg, params);

    bool local = traj.termination == Termination::blowup_detected;
    const double grad_floor =
        params.p * (params.q + 1.0) / (params.q + 1.0 - params.p) * wc.d;
    for (int k = 0; k < traj.steps(); ++k) {
      if (!(traj.I[k] < 0.0)) local = false;
      if (!(traj.grad_p_norm_p[k] > grad_floor)) local = false;
    }
    BlowupDiagnostics diag = blowup_diagnostics(traj, params);
    local = local && diag.concavity_ok;
    const double J0 = traj.J.front();
    const bool xi_applies = J0 > 0.0 && J0 < wc.d;
    if (xi_applies && !(diag.xi_floor > 0.0)) local = false;

    char buf[128];
    std::snprintf(buf, sizeof buf, "[p=%g: T %.4f, concave %d, xi_floor %.3g%s] ", p,
                  traj.times.back(), diag.concavity_ok ? 1 : 0, diag.xi_floor,
                  xi_applies ? "" : " (J0 outside (0,d), xi not required)");
    detail += buf;
    ok = ok && local;
    s.trajectories.push_back(std::move(traj));
  }
  s.report(7, ok, "4 cos blowup: detected, I < 0, gradient above the well bound, "
                  "G^{-theta} concave " + detail);
}

// --- criterion 8: critical regime --------------------------------------------

void criterion_critical(Suite& s, const Grid& g, const WellConstants& wc) {
  const Params params = make_params(2.0);
  const Field profile = cosine_mode(g, 2);
  bool ok = true;
  std::string detail;

  for (bool left : {true, false}) {
    Field u0 = fiber_scale_to(profile, params, wc.d, left);
    const FunctionalReport r0 = evaluate(u0, params);
    if (std::abs(r0.J - wc.d) > 1e-3 * std::max(1.0, wc.d)) ok = false;
    RegimeReport rep = classify(u0, params, wc, 1e-3);
    SolverConfig cfg;
    cfg.t_end = 20.0;
    Trajectory traj = run(u0, cfg, params);
    verify(rep, traj);
    const bool want_decay = left;
    if (want_decay && traj.termination != Termination::horizon_reached) ok = false;
    if (!want_decay && traj.termination != Termination::blowup_detected) ok = false;
    if (rep.verdict != Verdict::consistent) ok = false;
    char buf[128];
    std::snprintf(buf, sizeof buf, "[%s branch: I0 %.3g, %s, %s] ",
                  left ? "I>=0" : "I<0", rep.I0, to_string(traj.termination),
                  to_string(rep.verdict));
    detail += buf;
    s.trajectories.push_back(std::move(traj));
  }
  s.report(8, ok, "J0 = d data: decay branch and blowup branch both consistent " + detail);
}

// --- criterion 9: supercritical decay ----------------------------------------

void criterion_supercritical(Suite& s, const Grid& g, const WellConstants& wc) {
  const Params params = make_params(2.0);
  const OptimizerSettings o = opt_budget();
  Field u0 = make_initial_data(cosine_mode(g, 2), Regime::T5_global_decay, params, wc);
  const FunctionalReport r0 = evaluate(u0, params);

  bool ok = r0.J > wc.d && r0.I > 0.0;
  LambdaAlphaEstimate la = estimate_lambda_alpha(g, params, r0.J, o);
  ok = ok && r0.h1_norm_sq <= la.value;

  SolverConfig cfg;
  cfg.t_end = 20.0;
  Trajectory traj = run(u0, cfg, params);
  ok = ok && traj.termination == Termination::horizon_reached &&
       traj.h1_norm_sq.back() < 1e-4 * traj.h1_0();

  // lambda_alpha non-increasing across alpha
  const double a1 = estimate_lambda_alpha(g, params, 1.1 * wc.d, o).value;
  const double a2 = estimate_lambda_alpha(g, params, 2.0 * wc.d, o).value;
  const double a3 = estimate_lambda_alpha(g, params, 4.0 * wc.d, o).value;
  const double tol = 1e-6 * a1;
  ok = ok && a2 <= a1 + tol && a3 <= a2 + tol;

  char buf[192];
  std::snprintf(buf, sizeof buf,
                "J0 %.3f > d %.3f, h1_0 %.3f <= lambda_J0 %.3f, final h1 %.2e; "
                "lambda_alpha %.3f >= %.3f >= %.3f",
                r0.J, wc.d, r0.h1_norm_sq, la.value, traj.h1_norm_sq.back(), a1, a2, a3);
  s.report(9, ok, buf);
  s.trajectories.push_back(std::move(traj));
}

// --- criterion 10: nonlinear term inequality ---------------------------------

void criterion_nonlinear_bound(Suite& s, const Grid& g) {
  bool ok = true;
  std::mt19937_64 seeds(2718);
  std::normal_distribution<double> amp(0.0, 3.0);
  for (double q : {1.5, 2.0, 3.0}) {
    Params params = make_params(2.0);
    params.q = q;
    std::mt19937_64 rng(seeds());
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
      Field a(g), b(g);
      const double sa = std::abs(amp(rng)) + 1e-3, sb = std::abs(amp(rng)) + 1e-3;
      for (double& x : a.values) x = sa * u(rng);
      for (double& x : b.values) x = sb * u(rng);
      if (!nonlinear_term_bound_holds(a, b, params)) ok = false;
    }
  }
  s.report(10, ok, "pointwise nonlinear-term bound holds for 1000 pairs per q in {1.5,2,3}");
}

// --- criterion 11: I_delta sign invariance -----------------------------------

void criterion_sign_invariance(Suite& s, const Grid& g, const WellConstants& wc2,
                               const WellConstants& wc15) {
  bool ok = true;
  std::mt19937_64 seeds(31415);
  for (double p : {2.0, 1.5}) {
    const Params params = make_params(p);
    const WellConstants& wc = p == 2.0 ? wc2 : wc15;
    for (int trial = 0; trial < 50; ++trial) {
      Field v = random_smooth_field(g, seeds());
      const double level = (0.2 + 0.6 * (trial / 49.0)) * wc.d; // inside (d0, d) = (0, d)
      Field u = fiber_scale_to(v, params, level, trial % 2 == 0);
      const auto [d1, d2] = d_delta_roots(wc.cstar, params, evaluate(u, params).J);
      int pos = 0, neg = 0;
      for (int k = 0; k < 50; ++k) {
        const double delta = d1 + (d2 - d1) * (k + 0.5) / 50.0;
        const double id = i_delta(u, params, delta);
        (id > 0.0 ? pos : neg)++;
      }
      if (pos != 0 && neg != 0) ok = false;
    }
  }
  s.report(11, ok, "sign of I_delta constant on (delta1, delta2) for 50 fields, both p");
}

// --- criterion 1: mass conservation over every run ---------------------------

void criterion_mass(Suite& s) {
  bool ok = !s.trajectories.empty();
  double worst = 0.0;
  for (const Trajectory& traj : s.trajectories) {
    for (int k = 0; k < traj.steps(); ++k) {
      // |u|_{q+1} <= |u|_inf on the unit-measure domain gives a safe stand-in
      const double lq1 = std::max(0.0, traj.grad_p_norm_p[k] - traj.I[k]);
      const double sup_lb = std::pow(lq1, 1.0 / (traj.params.q + 1.0));
      const double ratio = std::abs(traj.mass[k]) / std::max(1.0, sup_lb);
      worst = std::max(worst, ratio);
      if (ratio > 1e-10) ok = false;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |mean(u)| / max(1, |u|_inf) = %.3e over %zu runs",
                worst, s.trajectories.size());
  s.report(1, ok, buf);
}

} // namespace

int main() {
  const Grid g = Grid::interval(1.0, kN);
  Suite s;

  std::fprintf(stderr, "computing well constants (p = 2, p = 1.5, n = %d)...\n", kN);
  const WellConstants wc2 = compute_well_constants(g, make_params(2.0), opt_budget());
  const WellConstants wc15 = compute_well_constants(g, make_params(1.5), opt_budget());

  criterion_energy_identity(s, g);
  criterion_depth_routes(s, wc2, wc15);
  criterion_d_delta_shape(s, wc2, wc15);
  criterion_fiber_law(s, g);
  criterion_t1_decay(s, g);
  criterion_blowup(s, g, wc2, wc15);
  criterion_critical(s, g, wc2);
  criterion_supercritical(s, g, wc2);
  criterion_nonlinear_bound(s, g);
  criterion_sign_invariance(s, g, wc2, wc15);
  criterion_mass(s);

  std::sort(s.results.begin(), s.results.end(), [](const auto& a, const auto& b) {
    auto num = [](const std::string& t) { return std::stoi(t.substr(10)); };
    return num(a.second) < num(b.second);
  });

  int failures = 0;
  for (const auto& [ok, line] : s.results) {
    std::printf("%s\n", line.c_str());
    if (!ok) ++failures;
  }
  std::printf("%zu/%zu criteria passed\n", s.results.size() - failures, s.results.size());
  return failures == 0 ? 0 : 1;
}
