#pragma once

#include "potwell/grid.hpp"
#include "potwell/params.hpp"

namespace potwell {

/// Scalar variational quantities of a field. Satisfies
///   J = grad_p_norm_p/p - lq1_norm_q1/(q+1),
///   I = grad_p_norm_p - lq1_norm_q1,
///   J = (1/p - 1/(q+1)) grad_p_norm_p + I/(q+1)
/// to roundoff by construction.
struct FunctionalReport {
  double grad_p_norm_p = 0.0; // |grad u|_p^p
  double lq1_norm_q1 = 0.0;   // |u|_{q+1}^{q+1}
  double h1_norm_sq = 0.0;    // |u|_2^2 + |grad u|_2^2
  double J = 0.0;
  double I = 0.0;
};

/// sign(u)*|u|^q, with 0 mapped to 0.
double signed_pow(double u, double q);

/// Face-midpoint quadrature of |grad u|^p. Uses the same summation-by-parts
/// face weights as the p-Laplacian stencil, so energy identities carry over
/// exactly.
double grad_norm_p_pow(const Field& u, double p);

/// Nodal trapezoid quadrature of |u|^s.
double lp_norm_pow(const Field& u, double s);

double l2_norm_sq(const Field& u);
double h1_norm_sq(const Field& u);

FunctionalReport evaluate(const Field& u, const Params& params);

/// I_delta(u) = delta*|grad u|_p^p - |u|_{q+1}^{q+1}.
double i_delta(const Field& u, const Params& params, double delta);

/// Threshold radius r(delta) = (delta / C*^{q+1})^{1/(q+1-p)}.
double r_of_delta(double cstar, const Params& params, double delta);

/// Fiber-map maximizer lambda* = (|grad u|_p^p / |u|_{q+1}^{q+1})^{1/(q-p+1)};
/// I(lambda* u) = 0. Throws std::domain_error on |u|_{q+1} = 0.
double lambda_star(const Field& u, const Params& params);

/// Pointwise estimate of the nonlinear term: true iff
///   |u1|^{q-1}u1 - |u2|^{q-1}u2 <= q(|u1|+|u2|)^{q-1}|u1-u2|
/// at every node where |u1|+|u2| > 0 and u1 != u2 (other nodes are skipped).
bool nonlinear_term_bound_holds(const Field& u1, const Field& u2, const Params& params);

} // namespace potwell
