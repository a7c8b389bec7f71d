#include "potwell/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

using json = nlohmann::json;

namespace potwell {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::T1_global_decay: return "T1_global_decay";
    case Regime::T2_blowup: return "T2_blowup";
    case Regime::T3_global: return "T3_global";
    case Regime::T4_blowup: return "T4_blowup";
    case Regime::T5_global_decay: return "T5_global_decay";
    case Regime::indeterminate: return "indeterminate";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  if (s == "T1" || s == "T1_global_decay") return Regime::T1_global_decay;
  if (s == "T2" || s == "T2_blowup") return Regime::T2_blowup;
  if (s == "T3" || s == "T3_global") return Regime::T3_global;
  if (s == "T4" || s == "T4_blowup") return Regime::T4_blowup;
  if (s == "T5" || s == "T5_global_decay") return Regime::T5_global_decay;
  if (s == "indeterminate") return Regime::indeterminate;
  throw std::invalid_argument("unknown regime tag: " + s);
}

RegimeReport classify(const Field& u0, const Params& params, const WellConstants& wells,
                      double tol_d, std::optional<double> lambda_alpha) {
  params.validate();
  const FunctionalReport f = evaluate(u0, params);
  RegimeReport r;
  r.J0 = f.J;
  r.I0 = f.I;
  r.d = wells.d;
  r.h1_0 = f.h1_norm_sq;
  r.lambda_alpha_estimate = lambda_alpha;

  if (r.h1_0 <= 1e-28) { // trivial stationary datum
    r.predicted = Regime::indeterminate;
    return r;
  }

  const bool critical = std::abs(r.J0 - r.d) <= tol_d * std::max(1.0, r.d);
  if (critical) {
    r.predicted = (r.I0 >= 0.0) ? Regime::T3_global : Regime::T4_blowup;
  } else if (r.J0 < r.d) {
    if (r.I0 > 0.0)
      r.predicted = Regime::T1_global_decay;
    else if (r.I0 < 0.0)
      r.predicted = Regime::T2_blowup;
    else
      r.predicted = Regime::indeterminate;
  } else { // J0 > d
    if (r.I0 > 0.0 && lambda_alpha && r.h1_0 <= *lambda_alpha)
      r.predicted = Regime::T5_global_decay;
    else
      r.predicted = Regime::indeterminate;
  }
  return r;
}

namespace {

// analytic fiber J(lambda u) = lambda^p F/p - lambda^{q+1} G/(q+1)
struct Fiber {
  double F = 0.0, G = 0.0, p = 0.0, q = 0.0;
  double J(double lam) const {
    return std::pow(lam, p) * F / p - std::pow(lam, q + 1.0) * G / (q + 1.0);
  }
  double lambda_star() const { return std::pow(F / G, 1.0 / (q - p + 1.0)); }
  double max_J() const { return J(lambda_star()); }
};

// bisection for J(lambda) = target on a monotone branch
double fiber_bisect(const Fiber& fib, double lo, double hi, double target, bool rising) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool below = fib.J(mid) < target;
    if (below == rising)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

Field make_initial_data(const Field& profile, Regime target, const Params& params,
                        const WellConstants& wells) {
  params.validate();
  Fiber fib;
  fib.p = params.p;
  fib.q = params.q;
  fib.F = grad_norm_p_pow(profile, params.p);
  fib.G = lp_norm_pow(profile, params.q + 1.0);
  if (fib.F <= 0.0 || fib.G <= 0.0)
    throw std::invalid_argument("make_initial_data: profile must be nonzero");

  const double lstar = fib.lambda_star();
  const double phi = fib.max_J(); // fiber maximum J(lambda* u)
  const double d = wells.d;

  auto infeasible = [&](const char* tag) {
    std::ostringstream os;
    os << "make_initial_data: target " << tag << " infeasible on this fiber, J(lambda* u) = "
       << phi << " vs d = " << d;
    throw std::runtime_error(os.str());
  };

  double lam = 0.0;
  switch (target) {
    case Regime::T1_global_decay:
      lam = fiber_bisect(fib, 0.0, lstar, 0.5 * std::min(d, phi), true);
      break;
    case Regime::T2_blowup: {
      double hi = 2.0 * lstar;
      while (fib.J(hi) > 0.5 * d) hi *= 2.0;
      lam = fiber_bisect(fib, lstar, hi, 0.5 * d, false);
      break;
    }
    case Regime::T3_global:
      if (!(phi > d)) infeasible("T3");
      lam = fiber_bisect(fib, 0.0, lstar, d, true);
      break;
    case Regime::T4_blowup: {
      if (!(phi > d)) infeasible("T4");
      double hi = 2.0 * lstar;
      while (fib.J(hi) > d) hi *= 2.0;
      lam = fiber_bisect(fib, lstar, hi, d, false);
      break;
    }
    case Regime::T5_global_decay: {
      if (!(phi > 1.05 * d)) infeasible("T5");
      const double target_J = d + std::min(0.5 * d, 0.5 * (phi - d));
      lam = fiber_bisect(fib, 0.0, lstar, target_J, true);
      break;
    }
    case Regime::indeterminate:
      throw std::invalid_argument("make_initial_data: cannot target indeterminate");
  }

  Field out = profile;
  for (double& v : out.values) v *= lam;
  return out;
}

DecayFit decay_fit(const Trajectory& traj, double window) {
  const int n = traj.steps();
  if (n < 2) throw std::runtime_error("decay_fit: trajectory too short");
  int k0 = static_cast<int>(std::floor((1.0 - window) * n));
  k0 = std::clamp(k0, 0, n - 2);

  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  const int m = n - k0;
  for (int k = k0; k < n; ++k) {
    if (!(traj.h1_norm_sq[k] > 0.0))
      throw std::runtime_error("decay_fit: non-positive h1 values in fit window");
    const double t = traj.times[k], y = std::log(traj.h1_norm_sq[k]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    syy += y * y;
  }
  const double denom = m * stt - st * st;
  DecayFit fit;
  if (denom <= 0.0) return fit; // degenerate abscissae
  const double slope = (m * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / m;
  fit.rate = -0.5 * slope;
  double ss_res = 0.0;
  const double ss_tot = syy - sy * sy / m;
  for (int k = k0; k < n; ++k) {
    const double y = std::log(traj.h1_norm_sq[k]);
    const double e = y - (intercept + slope * traj.times[k]);
    ss_res += e * e;
  }
  fit.r_squared = (ss_tot <= 1e-28) ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

BlowupDiagnostics blowup_diagnostics(const Trajectory& traj, const Params& params,
                                     double fit_window) {
  const int n = traj.steps();
  if (n < 10) throw std::runtime_error("blowup_diagnostics: trajectory too short (< 10 steps)");

  BlowupDiagnostics d;
  d.T0 = traj.times.back();
  d.theta = (params.q - 1.0) / 4.0;
  d.t = traj.times;
  d.G.resize(n);
  const double h1_0 = traj.h1_0();
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) acc += traj.h1_norm_sq[k] * traj.dts[k];
    d.G[k] = acc + (d.T0 - traj.times[k]) * h1_0;
  }

  d.xi_floor = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    d.xi_floor = std::min(d.xi_floor, -2.0 * traj.I[k] - (params.q + 3.0) * traj.D[k]);

  std::vector<double> y(n);
  for (int k = 0; k < n; ++k) y[k] = std::pow(d.G[k], -d.theta);

  // concavity of G^{-theta} over the final third. Adaptive steppers can emit
  // near-duplicate times there, so resample on a uniform time grid before
  // taking nonuniform second differences; this keeps the check scale-aware
  // instead of amplifying round-off on micro-steps.
  const int kc = std::max(1, 2 * n / 3);
  std::vector<int> idx;
  {
    const double ta = d.t[kc], tb = d.t[n - 1];
    const int target = 200;
    idx.reserve(target + 1);
    for (int j = 0; j <= target; ++j) {
      const double tj = ta + (tb - ta) * j / target;
      const auto it = std::lower_bound(d.t.begin() + kc, d.t.end(), tj);
      int k = static_cast<int>(it - d.t.begin());
      if (k >= n) k = n - 1;
      if (idx.empty() || k > idx.back()) idx.push_back(k);
    }
  }
  bool ok = true;
  for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
    const double t0 = d.t[idx[j - 1]], t1 = d.t[idx[j]], t2 = d.t[idx[j + 1]];
    const double y0 = y[idx[j - 1]], y1 = y[idx[j]], y2 = y[idx[j + 1]];
    if (t2 - t0 <= 0.0) continue;
    const double d2 = 2.0 * ((y2 - y1) / (t2 - t1) - (y1 - y0) / (t1 - t0)) / (t2 - t0);
    const double hm = 0.5 * (t2 - t0);
    const double slack = 1e-9 * std::abs(y1) / (hm * hm) + 1e-300;
    if (d2 > slack) {
      ok = false;
      break;
    }
  }
  d.concavity_ok = ok;

  // linear extrapolation of G^{-theta} to zero from the final segment
  int k0 = static_cast<int>(std::floor((1.0 - fit_window) * n));
  k0 = std::clamp(k0, 0, n - 2);
  double st = 0, sy = 0, stt = 0, sty = 0;
  const int m = n - k0;
  for (int k = k0; k < n; ++k) {
    st += d.t[k];
    sy += y[k];
    stt += d.t[k] * d.t[k];
    sty += d.t[k] * y[k];
  }
  const double denom = m * stt - st * st;
  if (denom > 0.0) {
    const double slope = (m * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / m;
    if (slope < 0.0) d.extrapolated_T = -intercept / slope;
  }
  return d;
}

void verify(RegimeReport& report, const Trajectory& traj,
            const std::optional<BlowupDiagnostics>& diag) {
  report.observed_termination = traj.termination;
  const double tol_i = 1e-8 * std::max(1.0, std::abs(report.I0));

  const Regime pr = report.predicted;
  const bool decay_regime = pr == Regime::T1_global_decay || pr == Regime::T3_global ||
                            pr == Regime::T5_global_decay;
  const bool blowup_regime = pr == Regime::T2_blowup || pr == Regime::T4_blowup;

  if (decay_regime) {
    bool sign_ok = true;
    for (double i : traj.I)
      if (i < -tol_i) sign_ok = false;
    report.i_sign_preserved = sign_ok;

    if (traj.termination == Termination::horizon_reached) {
      bool fit_ok = false;
      try {
        DecayFit fit = decay_fit(traj);
        report.decay_rate = fit.rate;
        report.decay_r_squared = fit.r_squared;
        fit_ok = fit.r_squared > 0.99;
      } catch (const std::exception&) {
        fit_ok = false;
      }
      report.verdict =
          (fit_ok && sign_ok) ? Verdict::consistent : Verdict::inconsistent;
    } else if (traj.termination == Termination::blowup_detected) {
      report.verdict = Verdict::inconsistent;
    } else {
      report.verdict = Verdict::indeterminate;
    }
    return;
  }

  if (blowup_regime) {
    bool sign_ok = true;
    for (double i : traj.I)
      if (i > tol_i) sign_ok = false;
    report.i_sign_preserved = sign_ok;

    if (traj.termination == Termination::blowup_detected) {
      report.blowup_time = traj.times.back();
      bool concave = false;
      if (diag) {
        concave = diag->concavity_ok;
      } else if (traj.steps() >= 10) {
        concave = blowup_diagnostics(traj, traj.params).concavity_ok;
      }
      report.verdict = concave ? Verdict::consistent : Verdict::inconsistent;
    } else if (traj.termination == Termination::horizon_reached) {
      report.verdict = Verdict::inconsistent;
    } else {
      report.verdict = Verdict::indeterminate;
    }
    return;
  }

  report.verdict = Verdict::indeterminate;
}

std::string regime_report_to_json(const RegimeReport& r) {
  json j;
  j["J0"] = r.J0;
  j["I0"] = r.I0;
  j["d"] = r.d;
  j["h1_0"] = r.h1_0;
  if (r.lambda_alpha_estimate) j["lambda_alpha_estimate"] = *r.lambda_alpha_estimate;
  j["predicted"] = to_string(r.predicted);
  if (r.observed_termination) j["observed_termination"] = to_string(*r.observed_termination);
  if (r.decay_rate) j["decay_rate"] = *r.decay_rate;
  if (r.decay_r_squared) j["decay_r_squared"] = *r.decay_r_squared;
  if (r.blowup_time) j["blowup_time"] = *r.blowup_time;
  j["i_sign_preserved"] = r.i_sign_preserved;
  j["verdict"] = to_string(r.verdict);
  return j.dump(2);
}

std::string regime_report_summary(const RegimeReport& r) {
  std::ostringstream os;
  os << "initial data: J0 = " << r.J0 << ", I0 = " << r.I0 << ", |u0|_H1^2 = " << r.h1_0
     << ", well depth d = " << r.d << "\n";
  os << "predicted regime: " << to_string(r.predicted);
  if (r.predicted == Regime::T5_global_decay && r.lambda_alpha_estimate)
    os << " (|u0|_H1^2 <= lambda_alpha upper-bound estimate " << *r.lambda_alpha_estimate
       << "; condition plausibly satisfied)";
  os << "\n";
  if (r.observed_termination) {
    os << "observed: " << to_string(*r.observed_termination);
    if (r.decay_rate) os << ", decay rate " << *r.decay_rate << " (r^2 " << *r.decay_r_squared << ")";
    if (r.blowup_time) os << ", blowup time " << *r.blowup_time;
    os << "\n";
  }
  os << "verdict: " << to_string(r.verdict) << "\n";
  return os.str();
}

std::string blowup_diagnostics_to_json(const BlowupDiagnostics& d) {
  json j;
  j["T0"] = d.T0;
  j["theta"] = d.theta;
  j["xi_floor"] = d.xi_floor;
  j["concavity_ok"] = d.concavity_ok;
  if (d.extrapolated_T) j["extrapolated_T"] = *d.extrapolated_T;
  j["t"] = d.t;
  j["G"] = d.G;
  return j.dump(2);
}

} // namespace potwell
