#include "potwell/wells.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <functional>
#include <future>
#include <random>
#include <stdexcept>

using json = nlohmann::json;

namespace potwell {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Objective {
  double value = 0.0;
  Field grad;
};

using ObjFn = std::function<Objective(const Field&)>;

struct DescentResult {
  double value = 0.0;
  Field minimizer;
  bool converged = false;
  int iterations = 0;
};

Field normalized(const Field& v) {
  const double m = max_norm(v);
  if (m == 0.0) return v;
  Field out = v;
  for (double& x : out.values) x /= m;
  return out;
}

// Projected gradient descent with backtracking line search on a scale-invariant
// objective over the discrete mean-zero space. Renormalizes every step.
DescentResult minimize_projected(const ObjFn& fn, Field v, int max_iters, double tol) {
  v = normalized(project_zero_mean(v));
  Objective cur = fn(v);
  double step = 1e-2;
  DescentResult res;
  res.converged = false;

  int it = 0;
  for (; it < max_iters; ++it) {
    Field g = project_zero_mean(cur.grad);
    const double gmax = max_norm(g);
    if (gmax == 0.0 || !std::isfinite(gmax)) break;

    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Field trial = v;
      const double s = step / gmax;
      for (int i = 0; i < trial.size(); ++i) trial.values[i] -= s * g.values[i];
      trial = normalized(project_zero_mean(trial));
      Objective next = fn(trial);
      if (std::isfinite(next.value) && next.value < cur.value) {
        const double drop = cur.value - next.value;
        v = std::move(trial);
        cur = std::move(next);
        accepted = true;
        step *= 1.3;
        if (drop < tol * std::max(1.0, std::abs(cur.value))) {
          res.converged = true;
          it = max_iters; // done
        }
        break;
      }
      step *= 0.5;
      if (step < 1e-16) break;
    }
    if (!accepted) {
      res.converged = true; // no descent direction left at line-search resolution
      break;
    }
  }
  res.value = cur.value;
  res.minimizer = std::move(v);
  res.iterations = it;
  return res;
}

struct MultiStartResult {
  DescentResult best;
  std::uint64_t best_seed = 0;
  int start_index = 0;
};

// Runs the descent from the deterministic cosine start plus opt.starts-1
// seeded random starts, concurrently, and picks the best value (deterministic
// tie-break on start index).
MultiStartResult multi_start(const ObjFn& fn, const Grid& grid, const OptimizerSettings& opt) {
  const int n = std::max(1, opt.starts);
  std::vector<std::future<DescentResult>> futs;
  std::vector<std::uint64_t> seeds(n, 0);
  for (int k = 0; k < n; ++k) {
    seeds[k] = opt.seed + static_cast<std::uint64_t>(k);
    futs.push_back(std::async(std::launch::async, [&, k]() {
      Field start = (k == 0) ? cosine_mode(grid, 1, grid.dim == 2 ? 1 : 0)
                             : random_smooth_field(grid, seeds[k], opt.smooth_passes);
      return minimize_projected(fn, start, opt.max_iters, opt.tol);
    }));
  }
  MultiStartResult out;
  bool first = true;
  for (int k = 0; k < n; ++k) {
    DescentResult r = futs[k].get();
    if (first || r.value < out.best.value) {
      out.best = std::move(r);
      out.best_seed = seeds[k];
      out.start_index = k;
      first = false;
    }
  }
  return out;
}

double reg_eps(const Field& v, double p) {
  if (p >= 2.0) return 0.0;
  const FaceGradient fg = gradient(v);
  double m = 0.0;
  for (const auto& c : fg.comp)
    for (double x : c) m = std::max(m, std::abs(x));
  return 1e-8 * std::max(1.0, m);
}

// Shared pieces of the quotient gradients: F = |grad v|_p^p, G = |v|_{q+1}^{q+1},
// nodal gradients gF = -p * p_laplacian(v), gG = (q+1) sign(v)|v|^q.
struct QuotientParts {
  double F = 0.0, G = 0.0;
  Field gF, gG;
};

QuotientParts quotient_parts(const Field& v, const Params& prm) {
  QuotientParts qp;
  qp.F = grad_norm_p_pow(v, prm.p);
  qp.G = lp_norm_pow(v, prm.q + 1.0);
  Field lap = p_laplacian(v, prm.p, reg_eps(v, prm.p));
  qp.gF = Field(v.grid);
  qp.gG = Field(v.grid);
  for (int i = 0; i < v.size(); ++i) {
    qp.gF.values[i] = -prm.p * lap.values[i];
    qp.gG.values[i] = (prm.q + 1.0) * signed_pow(v.values[i], prm.q);
  }
  return qp;
}

OptimizerProvenance make_provenance(const OptimizerSettings& opt, const MultiStartResult& ms,
                                    double achieved) {
  OptimizerProvenance prov;
  prov.settings = opt;
  prov.converged = ms.best.converged;
  prov.iterations = ms.best.iterations;
  prov.best_seed = ms.best_seed;
  prov.achieved_value = achieved;
  return prov;
}

} // namespace

Field cosine_mode(const Grid& grid, int kx, int ky) {
  Field f(grid);
  if (grid.dim == 1) {
    for (int i = 0; i < grid.counts[0]; ++i)
      f.values[i] = std::cos(kx * kPi * grid.x(i) / grid.extents[0]);
  } else {
    for (int iy = 0; iy < grid.counts[1]; ++iy)
      for (int ix = 0; ix < grid.counts[0]; ++ix)
        f[grid.index(ix, iy)] = std::cos(kx * kPi * grid.x(ix) / grid.extents[0]) *
                                (ky == 0 ? 1.0 : std::cos(ky * kPi * grid.y(iy) / grid.extents[1]));
  }
  return project_zero_mean(f);
}

Field random_smooth_field(const Grid& grid, std::uint64_t seed, int smooth_passes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Field f(grid);
  for (double& v : f.values) v = gauss(rng);
  if (smooth_passes > 0) {
    HelmholtzSolver helm(grid);
    for (int k = 0; k < smooth_passes; ++k) f = helm.solve(f);
  }
  return project_zero_mean(f);
}

CstarEstimate estimate_cstar(const Grid& grid, const Params& params,
                             const OptimizerSettings& opt) {
  params.validate();
  const double p = params.p, q = params.q;
  // minimize log R = (1/p) log F - (1/(q+1)) log G
  ObjFn fn = [&](const Field& v) {
    QuotientParts qp = quotient_parts(v, params);
    Objective o;
    if (qp.F <= 0.0 || qp.G <= 0.0) {
      o.value = std::numeric_limits<double>::infinity();
      o.grad = Field(v.grid);
      return o;
    }
    o.value = std::log(qp.F) / p - std::log(qp.G) / (q + 1.0);
    o.grad = Field(v.grid);
    for (int i = 0; i < v.size(); ++i)
      o.grad.values[i] = qp.gF.values[i] / (p * qp.F) - qp.gG.values[i] / ((q + 1.0) * qp.G);
    return o;
  };
  MultiStartResult ms = multi_start(fn, grid, opt);
  CstarEstimate est;
  est.cstar = std::exp(-ms.best.value); // C* = 1/R_min, log R = value
  est.minimizer = ms.best.minimizer;
  est.provenance = make_provenance(opt, ms, est.cstar);
  return est;
}

double depth_from_formula(double cstar, const Params& params) {
  if (!(cstar > 0.0)) throw std::domain_error("depth_from_formula: cstar must be positive");
  // same factored evaluation as d_delta so that d_delta(cstar, 1) == d exactly
  return d_delta(cstar, params, 1.0);
}

DepthEstimate depth_direct(const Grid& grid, const Params& params, const OptimizerSettings& opt) {
  params.validate();
  const double p = params.p, q = params.q;
  const double c1 = (q + 1.0) / (q + 1.0 - p);
  const double c2 = p / (q + 1.0 - p);
  const double lead = 1.0 / p - 1.0 / (q + 1.0);
  // minimize log objective = log lead + c1 log F - c2 log G
  ObjFn fn = [&](const Field& v) {
    QuotientParts qp = quotient_parts(v, params);
    Objective o;
    if (qp.F <= 0.0 || qp.G <= 0.0) {
      o.value = std::numeric_limits<double>::infinity();
      o.grad = Field(v.grid);
      return o;
    }
    o.value = std::log(lead) + c1 * std::log(qp.F) - c2 * std::log(qp.G);
    o.grad = Field(v.grid);
    for (int i = 0; i < v.size(); ++i)
      o.grad.values[i] = c1 * qp.gF.values[i] / qp.F - c2 * qp.gG.values[i] / qp.G;
    return o;
  };
  MultiStartResult ms = multi_start(fn, grid, opt);
  DepthEstimate est;
  est.d = std::exp(ms.best.value);
  est.minimizer = ms.best.minimizer;
  est.provenance = make_provenance(opt, ms, est.d);
  return est;
}

double d_delta(double cstar, const Params& params, double delta) {
  const double p = params.p, q = params.q;
  if (!(delta > 0.0) || delta > (q + 1.0) / p + 1e-15)
    throw std::domain_error("d_delta: delta outside (0, (q+1)/p]");
  return (1.0 / p - delta / (q + 1.0)) * std::pow(delta, p / (q + 1.0 - p)) *
         std::pow(cstar, -p * (q + 1.0) / (q + 1.0 - p));
}

double b_root(const Params& params) { return (params.q + 1.0) / params.p; }

std::pair<double, double> d_delta_roots(double cstar, const Params& params, double level) {
  const double d1 = d_delta(cstar, params, 1.0);
  if (!(level > 0.0) || !(level < d1))
    throw std::domain_error("d_delta_roots: level must lie in (0, d)");
  auto bisect = [&](double lo, double hi, bool rising) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool below = d_delta(cstar, params, mid) < level;
      if (below == rising)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double b = b_root(params);
  const double left = bisect(1e-14, 1.0, true);
  const double right = bisect(1.0, b, false);
  return {left, right};
}

LambdaAlphaEstimate estimate_lambda_alpha(const Grid& grid, const Params& params, double alpha,
                                          const OptimizerSettings& opt) {
  params.validate();
  const double p = params.p, q = params.q;
  const double lead = 1.0 / p - 1.0 / (q + 1.0);
  const double mu = 1e3; // penalty weight on the relative energy excess
  HelmholtzSolver helm(grid);

  // Every v parametrizes the Nehari point lambda*(v) v with
  //   J(lambda* v) = lead (F^{(q+1)/p}/G)^{p/(q+1-p)}  (the fiber maximum)
  //   |lambda* v|_{H1}^2 = (F/G)^{2/(q+1-p)} N,  N = |v|_{H1}^2.
  ObjFn fn = [&](const Field& v) {
    QuotientParts qp = quotient_parts(v, params);
    Objective o;
    if (qp.F <= 0.0 || qp.G <= 0.0) {
      o.value = std::numeric_limits<double>::infinity();
      o.grad = Field(v.grid);
      return o;
    }
    const double N = h1_norm_sq(v);
    const double two = 2.0 / (q + 1.0 - p);
    const double logH = two * (std::log(qp.F) - std::log(qp.G)) + std::log(N);
    const double c1 = (q + 1.0) / (q + 1.0 - p);
    const double c2 = p / (q + 1.0 - p);
    const double logPhi = std::log(lead) + c1 * std::log(qp.F) - c2 * std::log(qp.G);
    const double phi = std::exp(logPhi);
    const double excess = std::max(0.0, phi / alpha - 1.0);

    o.value = logH + mu * excess * excess;
    Field lap = laplacian(v);
    o.grad = Field(v.grid);
    for (int i = 0; i < v.size(); ++i) {
      const double glogH = two * (qp.gF.values[i] / qp.F - qp.gG.values[i] / qp.G) +
                           2.0 * (v.values[i] - lap.values[i]) / N;
      const double glogPhi = c1 * qp.gF.values[i] / qp.F - c2 * qp.gG.values[i] / qp.G;
      o.grad.values[i] = glogH + 2.0 * mu * excess * (phi / alpha) * glogPhi;
    }
    return o;
  };

  const int n = std::max(1, opt.starts);
  std::vector<std::future<DescentResult>> futs;
  for (int k = 0; k < n; ++k) {
    futs.push_back(std::async(std::launch::async, [&, k]() {
      Field start = (k == 0) ? cosine_mode(grid, 1, grid.dim == 2 ? 1 : 0)
                             : random_smooth_field(grid, opt.seed + k, opt.smooth_passes);
      return minimize_projected(fn, start, opt.max_iters, opt.tol);
    }));
  }

  LambdaAlphaEstimate best;
  bool found = false;
  for (int k = 0; k < n; ++k) {
    DescentResult r = futs[k].get();
    const Field& v = r.minimizer;
    const double F = grad_norm_p_pow(v, p), G = lp_norm_pow(v, q + 1.0);
    if (F <= 0.0 || G <= 0.0) continue;
    const double phi = lead * std::pow(std::pow(F, (q + 1.0) / p) / G, p / (q + 1.0 - p));
    if (phi > alpha * (1.0 + 1e-6)) continue; // infeasible start outcome
    const double lam = std::pow(F / G, 1.0 / (q + 1.0 - p));
    const double H = lam * lam * h1_norm_sq(v);
    if (!found || H < best.value) {
      best.value = H;
      Field u = v;
      for (double& x : u.values) x *= lam;
      best.minimizer = std::move(u);
      best.provenance.converged = r.converged;
      best.provenance.iterations = r.iterations;
      best.provenance.best_seed = opt.seed + k;
      found = true;
    }
  }
  if (!found) throw std::runtime_error("estimate_lambda_alpha: no Nehari point found below energy alpha");
  best.provenance.settings = opt;
  best.provenance.achieved_value = best.value;
  return best;
}

WellConstants compute_well_constants(const Grid& grid, const Params& params,
                                     const OptimizerSettings& opt) {
  WellConstants wc;
  wc.cstar_estimate = estimate_cstar(grid, params, opt);
  wc.cstar = wc.cstar_estimate.cstar;
  wc.d = depth_from_formula(wc.cstar, params);
  DepthEstimate dd = depth_direct(grid, params, opt);
  wc.depth_direct_value = dd.d;
  wc.depth_provenance = dd.provenance;
  wc.b = b_root(params);
  const int samples = 100;
  for (int i = 1; i <= samples; ++i) {
    const double delta = wc.b * static_cast<double>(i) / samples;
    wc.d_delta_curve.emplace_back(delta, d_delta(wc.cstar, params, delta));
  }
  wc.notes.push_back("b reported from the closed form as (q+1)/p; the variational root lies in (1,(q+1)/p]");
  wc.notes.push_back("d(delta) -> 0 as delta -> 0+ for all admissible (p,q); left endpoint d0 = 0");
  return wc;
}

namespace {
json provenance_json(const OptimizerProvenance& p) {
  return json{{"starts", p.settings.starts},
              {"max_iters", p.settings.max_iters},
              {"tol", p.settings.tol},
              {"seed", p.settings.seed},
              {"smooth_passes", p.settings.smooth_passes},
              {"converged", p.converged},
              {"iterations", p.iterations},
              {"best_seed", p.best_seed},
              {"achieved_value", p.achieved_value}};
}
} // namespace

std::string well_constants_to_json(const WellConstants& wc) {
  json j;
  j["cstar"] = wc.cstar;
  j["d"] = wc.d;
  j["b"] = wc.b;
  j["depth_direct"] = wc.depth_direct_value;
  json curve = json::array();
  for (const auto& [delta, val] : wc.d_delta_curve) curve.push_back({{"delta", delta}, {"d", val}});
  j["d_delta_curve"] = curve;
  j["provenance"] = {{"cstar", provenance_json(wc.cstar_estimate.provenance)},
                     {"depth_direct", provenance_json(wc.depth_provenance)},
                     {"notes", wc.notes}};
  return j.dump(2);
}

} // namespace potwell
