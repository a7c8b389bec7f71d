#include "potwell/functionals.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace potwell {

namespace {

double wline(int i, int n, double h) { return (i == 0 || i == n - 1) ? 0.5 * h : h; }

// component^2 weighted by the full gradient magnitude to the power p-2
double pterm(double comp_sq, double mag_sq, double p) {
  if (comp_sq == 0.0) return 0.0;
  if (p == 2.0) return comp_sq;
  return std::pow(mag_sq, 0.5 * (p - 2.0)) * comp_sq;
}

std::vector<double> nodal_dy(const Field& f) {
  const Grid& g = f.grid;
  const int nx = g.counts[0], ny = g.counts[1];
  std::vector<double> d(g.num_nodes(), 0.0);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      double v;
      if (iy == 0)
        v = (f[g.index(ix, 1)] - f[g.index(ix, 0)]) / g.h[1];
      else if (iy == ny - 1)
        v = (f[g.index(ix, ny - 1)] - f[g.index(ix, ny - 2)]) / g.h[1];
      else
        v = (f[g.index(ix, iy + 1)] - f[g.index(ix, iy - 1)]) / (2.0 * g.h[1]);
      d[g.index(ix, iy)] = v;
    }
  return d;
}

std::vector<double> nodal_dx(const Field& f) {
  const Grid& g = f.grid;
  const int nx = g.counts[0], ny = g.counts[1];
  std::vector<double> d(g.num_nodes(), 0.0);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      double v;
      if (ix == 0)
        v = (f[g.index(1, iy)] - f[g.index(0, iy)]) / g.h[0];
      else if (ix == nx - 1)
        v = (f[g.index(nx - 1, iy)] - f[g.index(nx - 2, iy)]) / g.h[0];
      else
        v = (f[g.index(ix + 1, iy)] - f[g.index(ix - 1, iy)]) / (2.0 * g.h[0]);
      d[g.index(ix, iy)] = v;
    }
  return d;
}

} // namespace

double signed_pow(double u, double q) {
  if (u == 0.0) return 0.0;
  return (u > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(u), q);
}

double grad_norm_p_pow(const Field& u, double p) {
  const Grid& g = u.grid;
  const FaceGradient fg = gradient(u);
  const int nx = g.counts[0];
  double s = 0.0;

  if (g.dim == 1) {
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const double gx = fg.comp[0][ix];
      s += g.h[0] * pterm(gx * gx, gx * gx, p);
    }
    return s;
  }

  const int ny = g.counts[1];
  const std::vector<double> dy = nodal_dy(u);
  const std::vector<double> dx = nodal_dx(u);
  for (int iy = 0; iy < ny; ++iy) {
    const double wy = wline(iy, ny, g.h[1]);
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const double gx = fg.comp[0][iy * (nx - 1) + ix];
      const double gy = 0.5 * (dy[g.index(ix, iy)] + dy[g.index(ix + 1, iy)]);
      s += g.h[0] * wy * pterm(gx * gx, gx * gx + gy * gy, p);
    }
  }
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double wx = wline(ix, nx, g.h[0]);
      const double gy = fg.comp[1][iy * nx + ix];
      const double gx = 0.5 * (dx[g.index(ix, iy)] + dx[g.index(ix, iy + 1)]);
      s += g.h[1] * wx * pterm(gy * gy, gx * gx + gy * gy, p);
    }
  return s;
}

double lp_norm_pow(const Field& u, double s) {
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i)
    acc += u.grid.weights[i] * std::pow(std::abs(u.values[i]), s);
  return acc;
}

double l2_norm_sq(const Field& u) {
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i) acc += u.grid.weights[i] * u.values[i] * u.values[i];
  return acc;
}

double h1_norm_sq(const Field& u) { return l2_norm_sq(u) + grad_norm_p_pow(u, 2.0); }

FunctionalReport evaluate(const Field& u, const Params& params) {
  FunctionalReport r;
  r.grad_p_norm_p = grad_norm_p_pow(u, params.p);
  r.lq1_norm_q1 = lp_norm_pow(u, params.q + 1.0);
  r.h1_norm_sq = h1_norm_sq(u);
  r.J = r.grad_p_norm_p / params.p - r.lq1_norm_q1 / (params.q + 1.0);
  r.I = r.grad_p_norm_p - r.lq1_norm_q1;
  return r;
}

double i_delta(const Field& u, const Params& params, double delta) {
  return delta * grad_norm_p_pow(u, params.p) - lp_norm_pow(u, params.q + 1.0);
}

double r_of_delta(double cstar, const Params& params, double delta) {
  return std::pow(delta / std::pow(cstar, params.q + 1.0), 1.0 / (params.q + 1.0 - params.p));
}

double lambda_star(const Field& u, const Params& params) {
  const double gq = lp_norm_pow(u, params.q + 1.0);
  if (gq == 0.0) throw std::domain_error("lambda_star: |u|_{q+1} = 0");
  const double gp = grad_norm_p_pow(u, params.p);
  return std::pow(gp / gq, 1.0 / (params.q - params.p + 1.0));
}

bool nonlinear_term_bound_holds(const Field& u1, const Field& u2, const Params& params) {
  const double q = params.q;
  for (int i = 0; i < u1.size(); ++i) {
    const double a = u1.values[i], b = u2.values[i];
    if (a == b || std::abs(a) + std::abs(b) == 0.0) continue;
    const double lhs = signed_pow(a, q) - signed_pow(b, q);
    const double rhs = q * std::pow(std::abs(a) + std::abs(b), q - 1.0) * std::abs(a - b);
    if (lhs > rhs * (1.0 + 1e-13) + 1e-300) return false;
  }
  return true;
}

} // namespace potwell
