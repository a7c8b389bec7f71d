#pragma once

namespace potwell {

/// Exponent pair (p, q) and spatial dimension of the evolution problem
///   u_t - div(|grad u|^{p-2} grad u) - Lap u_t = |u|^{q-1}u - avg(|u|^{q-1}u).
/// All admissibility constraints on (p, q, dim) live in validate().
struct Params {
  double p = 2.0;
  double q = 3.0;
  int dim = 1;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

} // namespace potwell
