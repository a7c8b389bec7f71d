#pragma once

#include <optional>
#include <string>
#include <vector>

#include "potwell/solver.hpp"
#include "potwell/wells.hpp"

namespace potwell {

enum class Regime {
  T1_global_decay, // J0 < d, I0 > 0
  T2_blowup,       // J0 < d, I0 < 0
  T3_global,       // J0 = d (tolerance), I0 >= 0
  T4_blowup,       // J0 = d, I0 < 0
  T5_global_decay, // J0 > d, I0 > 0, h1_0 <= lambda_{J0}
  indeterminate
};

enum class Verdict { consistent, inconsistent, indeterminate };

const char* to_string(Regime r);
const char* to_string(Verdict v);
Regime regime_from_string(const std::string& s);

struct RegimeReport {
  double J0 = 0.0, I0 = 0.0, d = 0.0, h1_0 = 0.0;
  std::optional<double> lambda_alpha_estimate;
  Regime predicted = Regime::indeterminate;

  // observed (filled by verify)
  std::optional<Termination> observed_termination;
  std::optional<double> decay_rate, decay_r_squared;
  std::optional<double> blowup_time;
  bool i_sign_preserved = false;
  Verdict verdict = Verdict::indeterminate;
};

struct BlowupDiagnostics {
  double T0 = 0.0;             // horizon used (last recorded time)
  std::vector<double> t;       // sample times
  std::vector<double> G;       // Levine functional samples
  double theta = 0.0;          // (q-1)/4
  double xi_floor = 0.0;       // min over samples of xi(t) = -2I - (q+3) D
  bool concavity_ok = false;   // G^{-theta} concave over the final third
  std::optional<double> extrapolated_T;
};

struct DecayFit {
  double rate = 0.0;
  double r_squared = 1.0;
};

/// Prediction part of a RegimeReport: J0/I0/d/h1_0 and the theorem regime.
/// J0 = d is decided by |J0 - d| <= tol_d * max(1, d). A candidate T5 field
/// without a lambda_alpha estimate classifies as indeterminate.
RegimeReport classify(const Field& u0, const Params& params, const WellConstants& wells,
                      double tol_d = 1e-3, std::optional<double> lambda_alpha = std::nullopt);

/// Fiber-scaled initial data lambda * profile targeting a regime, lambda found
/// by bisection on lambda -> J(lambda u). Throws std::runtime_error naming the
/// fiber maximum when the target is infeasible on this fiber.
Field make_initial_data(const Field& profile, Regime target, const Params& params,
                        const WellConstants& wells);

/// Least-squares slope of log h1_norm_sq vs t over the trailing `window`
/// fraction of samples; rate = -slope/2. Throws on non-positive h1 values.
DecayFit decay_fit(const Trajectory& traj, double window = 0.5);

/// Levine concavity diagnostics for an I < 0 run; fit_window is the trailing
/// fraction of G^{-theta} samples used for the blowup-time extrapolation.
BlowupDiagnostics blowup_diagnostics(const Trajectory& traj, const Params& params,
                                     double fit_window = 0.25);

/// Verdict part: confronts the prediction with the observed trajectory.
void verify(RegimeReport& report, const Trajectory& traj,
            const std::optional<BlowupDiagnostics>& diag = std::nullopt);

std::string regime_report_to_json(const RegimeReport& r);
std::string regime_report_summary(const RegimeReport& r);
std::string blowup_diagnostics_to_json(const BlowupDiagnostics& d);

} // namespace potwell
