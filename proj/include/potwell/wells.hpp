#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "potwell/functionals.hpp"
#include "potwell/grid.hpp"
#include "potwell/params.hpp"

namespace potwell {

struct OptimizerSettings {
  int starts = 8;
  int max_iters = 3000;
  double tol = 1e-12;       // relative objective decrease declaring convergence
  std::uint64_t seed = 20240817;
  int smooth_passes = 2;    // Helmholtz smoothing applied to random starts
};

/// Record of how an optimized constant was obtained.
struct OptimizerProvenance {
  OptimizerSettings settings;
  bool converged = true;    // false: iteration budget exhausted on the best start
  int iterations = 0;
  std::uint64_t best_seed = 0;
  double achieved_value = 0.0;
};

struct CstarEstimate {
  double cstar = 0.0;
  Field minimizer;
  OptimizerProvenance provenance;
};

struct DepthEstimate {
  double d = 0.0;
  Field minimizer;
  OptimizerProvenance provenance;
};

struct LambdaAlphaEstimate {
  double value = 0.0;       // upper bound on the true infimum
  Field minimizer;          // Nehari point realizing the bound
  OptimizerProvenance provenance;
};

/// Global variational constants of the discretized problem (with provenance
/// of the optimizer runs that produced them).
struct WellConstants {
  double cstar = 0.0;
  double d = 0.0;                                    // depth, from the Lemma 2.4-type closed form
  double b = 0.0;                                    // positive root of d(delta); (q+1)/p here
  double depth_direct_value = 0.0;                   // independent quotient-minimization route
  std::vector<std::pair<double, double>> d_delta_curve; // (delta, d(delta)), 100 samples on (0, b]
  CstarEstimate cstar_estimate;
  OptimizerProvenance depth_provenance;
  std::vector<std::string> notes;
};

// deterministic start profiles
Field cosine_mode(const Grid& grid, int kx, int ky = 0);
Field random_smooth_field(const Grid& grid, std::uint64_t seed, int smooth_passes = 2);

/// Best embedding constant C* = 1/inf |grad u|_p / |u|_{q+1} over mean-zero u,
/// by multi-start projected gradient descent on the Rayleigh quotient.
CstarEstimate estimate_cstar(const Grid& grid, const Params& params,
                             const OptimizerSettings& opt = {});

/// d = ((q+1-p)/(p(q+1))) * cstar^{-p(q+1)/(q+1-p)}.
double depth_from_formula(double cstar, const Params& params);

/// Minimizes (1/p - 1/(q+1)) (|grad v|_p^{q+1} / |v|_{q+1}^{q+1})^{p/(q+1-p)}
/// over nonzero mean-zero v. Independent route to the well depth.
DepthEstimate depth_direct(const Grid& grid, const Params& params,
                           const OptimizerSettings& opt = {});

/// Closed-form d(delta) = (1/p - delta/(q+1)) delta^{p/(q+1-p)} cstar^{-p(q+1)/(q+1-p)}.
/// Throws std::domain_error outside (0, (q+1)/p].
double d_delta(double cstar, const Params& params, double delta);

/// Positive root of d(delta): (q+1)/p from the closed form.
double b_root(const Params& params);

/// Bracketing roots delta1 < 1 < delta2 of d(delta) = level, by bisection on
/// the closed-form curve. Requires 0 < level < d.
std::pair<double, double> d_delta_roots(double cstar, const Params& params, double level);

/// Approximate minimum of |u|_{H1}^2 over {I(u) = 0, J(u) <= alpha}, alpha > d,
/// via penalized multi-start descent on the fiber parametrization. The result
/// is an upper bound on the true infimum. Throws std::runtime_error when no
/// feasible Nehari point is found below energy alpha.
LambdaAlphaEstimate estimate_lambda_alpha(const Grid& grid, const Params& params,
                                          double alpha, const OptimizerSettings& opt = {});

WellConstants compute_well_constants(const Grid& grid, const Params& params,
                                     const OptimizerSettings& opt = {});

/// JSON report: constants, curve samples, optimizer provenance.
std::string well_constants_to_json(const WellConstants& wc);

} // namespace potwell
