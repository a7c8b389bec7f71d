#pragma once

#include <cmath>
#include <random>

#include "potwell/grid.hpp"

namespace potwell::test {

constexpr double kPi = 3.14159265358979323846;

inline Field sample_1d(const Grid& g, double (*fn)(double)) {
  Field f(g);
  for (int i = 0; i < g.counts[0]; ++i) f.values[i] = fn(g.x(i));
  return f;
}

inline Field cos_pi_x(const Grid& g) {
  return sample_1d(g, +[](double x) { return std::cos(kPi * x); });
}

// rough nodal noise, mean-zero; for stencil/conservation properties
inline Field random_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  for (double& v : f.values) v = u(rng);
  return project_zero_mean(f);
}

} // namespace potwell::test
