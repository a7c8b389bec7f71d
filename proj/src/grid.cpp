#include "potwell/grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace potwell {

namespace {

// 1D trapezoid weight along one axis.
double wline(int i, int n, double h) { return (i == 0 || i == n - 1) ? 0.5 * h : h; }

void build_weights(Grid& g) {
  g.weights.assign(g.num_nodes(), 0.0);
  if (g.dim == 1) {
    for (int i = 0; i < g.counts[0]; ++i) g.weights[i] = wline(i, g.counts[0], g.h[0]);
  } else {
    for (int iy = 0; iy < g.counts[1]; ++iy)
      for (int ix = 0; ix < g.counts[0]; ++ix)
        g.weights[g.index(ix, iy)] =
            wline(ix, g.counts[0], g.h[0]) * wline(iy, g.counts[1], g.h[1]);
  }
}

void check_compatible(const Field& f) {
  if (static_cast<int>(f.values.size()) != f.grid.num_nodes())
    throw std::invalid_argument("Field: value count does not match grid");
}

// Nodal derivative along axis 1 (centered inside, one-sided at the walls).
// Used only to estimate the full gradient magnitude at axis-0 faces in 2D.
std::vector<double> nodal_derivative_y(const Field& f) {
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

std::vector<double> nodal_derivative_x(const Field& f) {
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

double diffusivity(double grad_sq, double p, double eps_reg) {
  const double s = grad_sq + eps_reg * eps_reg;
  if (p == 2.0) return 1.0;
  if (s == 0.0) return 0.0; // degenerate coefficient at flat regions, p < 2: zero flux
  return std::pow(s, 0.5 * (p - 2.0));
}

} // namespace

Grid Grid::interval(double length, int n) {
  if (!(length > 0.0)) throw std::invalid_argument("Grid: extent must be positive");
  if (n < 2) throw std::invalid_argument("Grid: needs at least 2 nodes per axis");
  Grid g;
  g.dim = 1;
  g.extents = {length, 1.0};
  g.counts = {n, 1};
  g.h = {length / (n - 1), 0.0};
  build_weights(g);
  return g;
}

Grid Grid::rectangle(double lx, double ly, int nx, int ny) {
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("Grid: extents must be positive");
  if (nx < 2 || ny < 2) throw std::invalid_argument("Grid: needs at least 2 nodes per axis");
  Grid g;
  g.dim = 2;
  g.extents = {lx, ly};
  g.counts = {nx, ny};
  g.h = {lx / (nx - 1), ly / (ny - 1)};
  build_weights(g);
  return g;
}

double mean(const Field& f) {
  check_compatible(f);
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += f.grid.weights[i] * f.values[i];
  return s / f.grid.measure();
}

Field project_zero_mean(const Field& f) {
  const double m = mean(f);
  Field out = f;
  for (double& v : out.values) v -= m;
  return out;
}

double max_norm(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Field& f) {
  for (double v : f.values)
    if (!std::isfinite(v)) return false;
  return true;
}

FaceGradient gradient(const Field& f) {
  check_compatible(f);
  const Grid& g = f.grid;
  FaceGradient fg;
  const int nx = g.counts[0];
  const int ny = (g.dim == 2) ? g.counts[1] : 1;
  fg.comp[0].assign((nx - 1) * ny, 0.0);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix)
      fg.comp[0][iy * (nx - 1) + ix] =
          (f[g.index(ix + 1, iy)] - f[g.index(ix, iy)]) / g.h[0];
  if (g.dim == 2) {
    fg.comp[1].assign(nx * (ny - 1), 0.0);
    for (int iy = 0; iy + 1 < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        fg.comp[1][iy * nx + ix] = (f[g.index(ix, iy + 1)] - f[g.index(ix, iy)]) / g.h[1];
  }
  return fg;
}

Field p_laplacian(const Field& f, double p, double eps_reg) {
  check_compatible(f);
  const Grid& g = f.grid;
  const FaceGradient fg = gradient(f);
  Field out(g);

  const int nx = g.counts[0];
  if (g.dim == 1) {
    // flux through the face between nodes ix and ix+1
    std::vector<double> flux(nx - 1);
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const double gx = fg.comp[0][ix];
      flux[ix] = diffusivity(gx * gx, p, eps_reg) * gx;
    }
    for (int ix = 0; ix < nx; ++ix) {
      const double fr = (ix < nx - 1) ? flux[ix] : 0.0;
      const double fl = (ix > 0) ? flux[ix - 1] : 0.0;
      out[ix] = (fr - fl) / g.weights[ix];
    }
    return out;
  }

  const int ny = g.counts[1];
  const std::vector<double> dy = nodal_derivative_y(f);
  const std::vector<double> dx = nodal_derivative_x(f);
  std::vector<double> fx((nx - 1) * ny), fy(nx * (ny - 1));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const double gx = fg.comp[0][iy * (nx - 1) + ix];
      const double gy = 0.5 * (dy[g.index(ix, iy)] + dy[g.index(ix + 1, iy)]);
      fx[iy * (nx - 1) + ix] = diffusivity(gx * gx + gy * gy, p, eps_reg) * gx;
    }
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double gy = fg.comp[1][iy * nx + ix];
      const double gx = 0.5 * (dx[g.index(ix, iy)] + dx[g.index(ix, iy + 1)]);
      fy[iy * nx + ix] = diffusivity(gx * gx + gy * gy, p, eps_reg) * gy;
    }

  for (int iy = 0; iy < ny; ++iy) {
    const double wy = wline(iy, ny, g.h[1]);
    for (int ix = 0; ix < nx; ++ix) {
      const double wx = wline(ix, nx, g.h[0]);
      const double fr = (ix < nx - 1) ? fx[iy * (nx - 1) + ix] : 0.0;
      const double fl = (ix > 0) ? fx[iy * (nx - 1) + ix - 1] : 0.0;
      const double fu = (iy < ny - 1) ? fy[iy * nx + ix] : 0.0;
      const double fd = (iy > 0) ? fy[(iy - 1) * nx + ix] : 0.0;
      out[g.index(ix, iy)] = ((fr - fl) * wy + (fu - fd) * wx) / (wx * wy);
    }
  }
  return out;
}

Field p_laplacian(const Field& f, const Params& params, double eps_reg) {
  return p_laplacian(f, params.p, eps_reg);
}

Field laplacian(const Field& f) { return p_laplacian(f, 2.0, 0.0); }

// --- Helmholtz solver -------------------------------------------------------

struct HelmholtzSolver::Impl {
  Grid grid;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

HelmholtzSolver::HelmholtzSolver(const Grid& g) {
  const int n = g.num_nodes();
  const int nx = g.counts[0];
  const int ny = (g.dim == 2) ? g.counts[1] : 1;

  // A = M + D^T C D in the weighted (summation-by-parts) form, so that
  // A v = M rhs realizes (I - Lap_h) v = rhs with Lap_h = -M^{-1} D^T C D.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * n);
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, g.weights[i]);

  auto add_face = [&](int a, int b, double facevol, double h) {
    const double k = facevol / (h * h);
    trip.emplace_back(a, a, k);
    trip.emplace_back(b, b, k);
    trip.emplace_back(a, b, -k);
    trip.emplace_back(b, a, -k);
  };

  for (int iy = 0; iy < ny; ++iy) {
    const double wy = (g.dim == 2) ? wline(iy, ny, g.h[1]) : 1.0;
    for (int ix = 0; ix + 1 < nx; ++ix)
      add_face(g.index(ix, iy), g.index(ix + 1, iy), g.h[0] * wy, g.h[0]);
  }
  if (g.dim == 2) {
    for (int iy = 0; iy + 1 < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const double wx = wline(ix, nx, g.h[0]);
        add_face(g.index(ix, iy), g.index(ix, iy + 1), g.h[1] * wx, g.h[1]);
      }
  }

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());

  auto impl = std::make_shared<Impl>();
  impl->grid = g;
  impl->ldlt.compute(A);
  if (impl->ldlt.info() != Eigen::Success)
    throw std::runtime_error("HelmholtzSolver: factorization of I - Lap_h failed");
  impl_ = std::move(impl);
}

const Grid& HelmholtzSolver::grid() const { return impl_->grid; }

Field HelmholtzSolver::solve(const Field& rhs) const {
  const Grid& g = impl_->grid;
  if (!rhs.grid.same_layout(g))
    throw std::invalid_argument("HelmholtzSolver: rhs grid does not match factorized grid");
  const int n = g.num_nodes();
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = g.weights[i] * rhs.values[i];
  Eigen::VectorXd x = impl_->ldlt.solve(b);
  Field out(g);
  for (int i = 0; i < n; ++i) out.values[i] = x[i];
  return out;
}

// --- snapshot io ------------------------------------------------------------

void write_field(const Field& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_field: cannot open " + path);
  os << "# potwell-field dim=" << f.grid.dim << " counts=" << f.grid.counts[0];
  if (f.grid.dim == 2) os << "," << f.grid.counts[1];
  os << " extents=" << std::setprecision(17) << f.grid.extents[0];
  if (f.grid.dim == 2) os << "," << f.grid.extents[1];
  os << "\n";
  os << std::setprecision(17);
  for (double v : f.values) os << v << "\n";
}

Field read_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_field: cannot open " + path);
  std::string header;
  std::getline(is, header);
  int dim = 0;
  std::array<int, 2> counts{0, 0};
  std::array<double, 2> extents{0.0, 0.0};
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      auto val = [&](const std::string& key) -> std::string {
        return tok.substr(key.size());
      };
      if (tok.rfind("dim=", 0) == 0) {
        dim = std::stoi(val("dim="));
      } else if (tok.rfind("counts=", 0) == 0) {
        std::string s = val("counts=");
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream cs(s);
        cs >> counts[0];
        if (!(cs >> counts[1])) counts[1] = 1;
      } else if (tok.rfind("extents=", 0) == 0) {
        std::string s = val("extents=");
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream es(s);
        es >> extents[0];
        if (!(es >> extents[1])) extents[1] = 1.0;
      }
    }
  }
  if (dim != 1 && dim != 2) throw std::runtime_error("read_field: bad header in " + path);
  Grid g = (dim == 1) ? Grid::interval(extents[0], counts[0])
                      : Grid::rectangle(extents[0], extents[1], counts[0], counts[1]);
  Field f(g);
  for (int i = 0; i < f.size(); ++i)
    if (!(is >> f.values[i])) throw std::runtime_error("read_field: truncated file " + path);
  return f;
}

} // namespace potwell
