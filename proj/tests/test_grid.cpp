#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "potwell/grid.hpp"
#include "test_helpers.hpp"

using namespace potwell;
using namespace potwell::test;

TEST_CASE("quadrature weights sum to the measure") {
  Grid g1 = Grid::interval(2.5, 77);
  double s = 0.0;
  for (double w : g1.weights) s += w;
  CHECK(s == doctest::Approx(2.5).epsilon(1e-14));

  Grid g2 = Grid::rectangle(1.0, 3.0, 17, 9);
  s = 0.0;
  for (double w : g2.weights) s += w;
  CHECK(s == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("mean: constant, two-node arithmetic, odd cosine") {
  Grid g = Grid::interval(1.0, 33);
  Field c(g, 3.0);
  CHECK(mean(c) == doctest::Approx(3.0).epsilon(1e-15));

  Grid g2 = Grid::interval(1.0, 2);
  Field f(g2);
  f.values = {2.0, 4.0};
  CHECK(mean(f) == doctest::Approx(3.0).epsilon(1e-15));

  Grid gf = Grid::interval(1.0, 256);
  CHECK(std::abs(mean(cos_pi_x(gf))) <= 1e-10); // analytic integral is 0
}

TEST_CASE("project_zero_mean is the mean-free projector") {
  Grid g2 = Grid::interval(1.0, 2);
  Field f(g2);
  f.values = {2.0, 4.0};
  Field p = project_zero_mean(f);
  CHECK(p.values[0] == doctest::Approx(-1.0));
  CHECK(p.values[1] == doctest::Approx(1.0));

  Grid g = Grid::interval(1.0, 64);
  Field r = random_field(g, 42);
  Field once = project_zero_mean(r);
  Field twice = project_zero_mean(once);
  for (int i = 0; i < r.size(); ++i)
    CHECK(twice.values[i] == doctest::Approx(once.values[i]).epsilon(1e-15));
  CHECK(std::abs(mean(once)) <= 1e-10 * std::max(1.0, max_norm(once)));
}

TEST_CASE("gradient: constants, linear ramp, cosine L2 norm") {
  Grid g = Grid::interval(1.0, 41);
  FaceGradient fg = gradient(Field(g, 7.0));
  for (double v : fg.comp[0]) CHECK(v == 0.0);

  Field ramp = sample_1d(g, +[](double x) { return x; });
  fg = gradient(ramp);
  for (double v : fg.comp[0]) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  // |grad cos(pi x)|_2 -> pi/sqrt(2) under refinement
  Grid gf = Grid::interval(1.0, 4096);
  fg = gradient(cos_pi_x(gf));
  double s = 0.0;
  for (double v : fg.comp[0]) s += gf.h[0] * v * v;
  CHECK(std::sqrt(s) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("p_laplacian: p = 2 identity, constants, discrete divergence theorem") {
  Grid g = Grid::interval(1.0, 65);
  Field f = random_field(g, 7);
  Field lin = laplacian(f);
  Field p2 = p_laplacian(f, 2.0, 0.0);
  for (int i = 0; i < f.size(); ++i)
    CHECK(p2.values[i] == doctest::Approx(lin.values[i]).epsilon(1e-14));

  Field z = p_laplacian(Field(g, 4.0), 3.0, 0.0);
  for (double v : z.values) CHECK(v == 0.0);

  for (double p : {1.5, 2.0, 3.0, 4.5}) {
    Field out = p_laplacian(f, p, 0.0);
    const double scale = std::max(1.0, max_norm(out));
    CHECK(std::abs(mean(out)) <= 1e-12 * scale);
  }
}

TEST_CASE("p_laplacian: degenerate flat region with p < 2 is zero flux, not NaN") {
  Grid g = Grid::interval(1.0, 21);
  Field f(g, 0.0);
  for (int i = 12; i < 21; ++i) f.values[i] = (g.x(i) - 0.55) * (g.x(i) - 0.55);
  Field out = p_laplacian(f, 1.5, 0.0);
  CHECK(all_finite(out));
}

TEST_CASE("p_laplacian 2d: divergence theorem and p = 2 reduction") {
  Grid g = Grid::rectangle(1.0, 2.0, 19, 23);
  Field f = random_field(g, 3);
  for (double p : {1.5, 3.0}) {
    Field out = p_laplacian(f, p, 1e-10);
    CHECK(std::abs(mean(out)) <= 1e-12 * std::max(1.0, max_norm(out)));
  }
  Field lin = laplacian(f);
  Field p2 = p_laplacian(f, 2.0, 0.0);
  for (int i = 0; i < f.size(); ++i)
    CHECK(p2.values[i] == doctest::Approx(lin.values[i]).epsilon(1e-13));
}

TEST_CASE("helmholtz: zero rhs, constants, mean preservation, residual") {
  Grid g = Grid::interval(1.0, 129);
  HelmholtzSolver helm(g);

  Field v = helm.solve(Field(g, 0.0));
  for (double x : v.values) CHECK(x == 0.0);

  v = helm.solve(Field(g, 5.0)); // constants are Neumann-harmonic
  for (double x : v.values) CHECK(x == doctest::Approx(5.0).epsilon(1e-12));

  Field rhs = random_field(g, 11);
  rhs.values[3] += 2.0; // nonzero mean on purpose
  v = helm.solve(rhs);
  CHECK(mean(v) == doctest::Approx(mean(rhs)).epsilon(1e-12));

  // residual (I - Lap) v - rhs in max norm
  Field lap = laplacian(v);
  double res = 0.0, rn = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    res = std::max(res, std::abs(v.values[i] - lap.values[i] - rhs.values[i]));
    rn = std::max(rn, std::abs(rhs.values[i]));
  }
  CHECK(res <= 1e-10 * std::max(1.0, rn));
}

TEST_CASE("helmholtz 2d residual") {
  Grid g = Grid::rectangle(1.0, 1.5, 17, 13);
  HelmholtzSolver helm(g);
  Field rhs = random_field(g, 5);
  Field v = helm.solve(rhs);
  Field lap = laplacian(v);
  double res = 0.0;
  for (int i = 0; i < v.size(); ++i)
    res = std::max(res, std::abs(v.values[i] - lap.values[i] - rhs.values[i]));
  CHECK(res <= 1e-10 * std::max(1.0, max_norm(rhs)));
  CHECK(mean(v) == doctest::Approx(mean(rhs)).epsilon(1e-11));
}

TEST_CASE("grid refinement: discrete norms converge at second order") {
  // |grad cos(pi x)|_2^2 -> pi^2/2
  auto err = [](int n) {
    Grid g = Grid::interval(1.0, n);
    FaceGradient fg = gradient(cos_pi_x(g));
    double s = 0.0;
    for (double v : fg.comp[0]) s += g.h[0] * v * v;
    return std::abs(s - kPi * kPi / 2.0);
  };
  const double e1 = err(64), e2 = err(128);
  CHECK(e1 / e2 > 3.0); // ~4 for second order
  CHECK(e2 / e1 < 0.35);
}

TEST_CASE("field snapshot roundtrip") {
  Grid g = Grid::rectangle(1.0, 0.5, 9, 7);
  Field f = random_field(g, 99);
  const std::string path = "tmp_field_roundtrip.field";
  write_field(f, path);
  Field r = read_field(path);
  REQUIRE(r.grid.same_layout(f.grid));
  for (int i = 0; i < f.size(); ++i) CHECK(r.values[i] == f.values[i]); // bit-exact
  std::remove(path.c_str());

  Grid g1 = Grid::interval(2.0, 33);
  Field f1 = random_field(g1, 1);
  write_field(f1, path);
  Field r1 = read_field(path);
  REQUIRE(r1.grid.same_layout(f1.grid));
  for (int i = 0; i < f1.size(); ++i) CHECK(r1.values[i] == f1.values[i]);
  std::remove(path.c_str());
}
