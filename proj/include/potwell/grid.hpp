#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "potwell/params.hpp"

namespace potwell {

/// Vertex-centered box grid (1D interval or 2D rectangle) with trapezoid
/// quadrature weights. Neumann boundaries are encoded as zero-flux faces,
/// so the weighted divergence of any face flux telescopes to zero exactly.
struct Grid {
  int dim = 1;
  std::array<double, 2> extents{1.0, 1.0}; // box lengths per axis
  std::array<int, 2> counts{3, 1};         // node counts per axis (boundary nodes included)
  std::array<double, 2> h{};               // spacing per axis
  std::vector<double> weights;             // nodal trapezoid weights, sum = measure()

  static Grid interval(double length, int n);
  static Grid rectangle(double lx, double ly, int nx, int ny);

  int num_nodes() const { return counts[0] * (dim == 2 ? counts[1] : 1); }
  double measure() const { return extents[0] * (dim == 2 ? extents[1] : 1.0); }
  int index(int ix, int iy = 0) const { return iy * counts[0] + ix; }
  double x(int ix) const { return ix * h[0]; }
  double y(int iy) const { return iy * h[1]; }

  bool same_layout(const Grid& o) const {
    return dim == o.dim && counts == o.counts && extents == o.extents;
  }
};

/// A grid function, one value per node. Value-semantic.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.num_nodes(), fill) {}

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
  int size() const { return static_cast<int>(values.size()); }
};

/// Face-flux arrays, one per axis. Axis-0 faces sit between x-neighbors:
/// (counts0-1) x counts1 entries, index iy*(counts0-1)+ix. Axis-1 faces sit
/// between y-neighbors: counts0 x (counts1-1) entries, index iy*counts0+ix.
/// Boundary faces (outside the box) carry zero flux and are not stored.
struct FaceGradient {
  std::array<std::vector<double>, 2> comp;
};

double mean(const Field& f);
Field project_zero_mean(const Field& f);
double max_norm(const Field& f);
bool all_finite(const Field& f);

FaceGradient gradient(const Field& f);

/// Discrete div((|grad f|^2 + eps^2)^{(p-2)/2} grad f) with zero-flux faces.
/// Output has exactly zero weighted mean up to roundoff.
Field p_laplacian(const Field& f, double p, double eps_reg);
Field p_laplacian(const Field& f, const Params& params, double eps_reg);

/// Linear Neumann Laplacian (the p = 2 case).
Field laplacian(const Field& f);

/// Pre-factorized direct solver for (I - Lap_h) v = rhs. Immutable after
/// construction, shareable read-only across threads.
class HelmholtzSolver {
public:
  explicit HelmholtzSolver(const Grid& grid);
  Field solve(const Field& rhs) const;
  const Grid& grid() const;

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Field snapshot file: header line
//   # potwell-field dim=<d> counts=<n0[,n1]> extents=<e0[,e1]>
// then node values in row-major order, one per line, full double precision.
void write_field(const Field& f, const std::string& path);
Field read_field(const std::string& path);

} // namespace potwell
