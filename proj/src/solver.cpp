#include "pobs/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "pobs/operator.hpp"
#include "pobs/penalty.hpp"
#include "stencil.hpp"

namespace pobs {

BumpSpec default_bump(const Grid& grid) {
  BumpSpec b;
  double shortest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid.dim(); ++k) {
    b.center[k] = 0.5 * (grid.lo(k) + grid.hi(k));
    shortest = std::min(shortest, grid.hi(k) - grid.lo(k));
  }
  b.radius = 0.25 * shortest;
  return b;
}

GridField make_bump(const Grid& grid, const BumpSpec& spec) {
  if (!(spec.radius > 0.0)) throw SeedError("bump radius must be positive");
  GridField w = sample(grid, [&](const Point& x) {
    double r2 = 0.0;
    for (int k = 0; k < grid.dim(); ++k) r2 += (x[k] - spec.center[k]) * (x[k] - spec.center[k]);
    const double r = std::sqrt(r2);
    if (r >= spec.radius) return 0.0;
    const double c = std::cos(M_PI * r / (2.0 * spec.radius));
    return spec.amplitude * c * c;
  });
  for (std::size_t i = 0; i < w.size(); ++i)
    if (grid.is_boundary(i)) w[i] = 0.0;
  return w;
}

DescentSeed find_descent_seed(const CoefficientField& a, const ProblemParams& params,
                              const BumpSpec& seed) {
  DescentSeed out;
  out.w0 = make_bump(a.grid, seed);
  const double top = out.w0.max();
  if (!(top > 0.0)) throw SeedError("seed bump has no positive part on the grid");
  for (double& v : out.w0.values) v /= top;

  auto J = [&](double t) { return ray_profile(out.w0, a, params, {t}).front(); };
  double t = 1.0;
  int k = 0;
  while (!(J(t) < 0.0)) {
    if (++k > 60) throw SeedError("no sign change of the ray energy within 60 doublings");
    t *= 2.0;
  }
  out.t0 = t;
  out.doublings = k;

  // Coarse scan of [0, t0], then golden-section refinement of the bracket.
  const int samples = 64;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= samples; ++i) {
    const double v = J(t * i / samples);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = t * std::max(best - 1, 0) / samples, hi = t * std::min(best + 1, samples) / samples;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = J(x1), f2 = J(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-10 * t; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = J(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = J(x2);
    }
  }
  out.t_peak = 0.5 * (lo + hi);
  out.peak_energy = J(out.t_peak);
  return out;
}

namespace {

struct System {
  std::vector<std::size_t> unknowns;  // node of each unknown
  std::vector<long> unknown_of;       // unknown of each node, −1 on ∂Ω
};

System interior_system(const Grid& g) {
  System s;
  s.unknown_of.assign(g.node_count(), -1);
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (!g.is_boundary(i)) {
      s.unknown_of[i] = static_cast<long>(s.unknowns.size());
      s.unknowns.push_back(i);
    }
  return s;
}

double l2(const GridField& r) {
  double s = 0.0;
  for (double v : r.values) s += v * v;
  return std::sqrt(s);
}

void require_finite(const GridField& u, const char* where) {
  if (!u.all_finite()) throw NumericError(std::string("non-finite iterate in ") + where);
}

// Newton direction for the energy gradient G = −R·vol: K d = −G = R·vol.
std::optional<Eigen::VectorXd> newton_direction(const GridField& u, const CoefficientField& a,
                                                const ProblemParams& prm, const System& sys,
                                                const GridField& res) {
  const Grid& g = u.grid;
  const double vol = g.cell_volume();
  std::vector<detail::Triplet> trip;
  trip.reserve(sys.unknowns.size() * (g.dim() == 1 ? 3 : g.dim() == 2 ? 7 : 15) * 4);
  detail::dirichlet_hessian(u, a.values, prm.p, prm.delta_reg, sys.unknown_of, trip);
  std::vector<Eigen::Triplet<double>> et;
  et.reserve(trip.size() + sys.unknowns.size());
  for (const auto& t : trip)
    et.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
  const std::size_t n = sys.unknowns.size();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double s = u[sys.unknowns[k]];
    const double pos = std::max(s, 0.0);
    const double react = pos > 0.0 ? prm.m2 * (prm.lambda - 1.0) * std::pow(pos, prm.lambda - 2.0) : 0.0;
    et.emplace_back(static_cast<int>(k), static_cast<int>(k),
                    vol * (prm.m1 * chi_eps_prime(s, prm.eps) - react));
    rhs[static_cast<Eigen::Index>(k)] = res[sys.unknowns[k]] * vol;
  }
  Eigen::SparseMatrix<double> K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  K.setFromTriplets(et.begin(), et.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() == Eigen::Success) {
    Eigen::VectorXd d = ldlt.solve(rhs);
    if (ldlt.info() == Eigen::Success && d.allFinite()) return d;
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd d = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !d.allFinite()) return std::nullopt;
  return d;
}

// Stable explicit pseudo-time step for u_t = R(u): dt·(2N·a_max·|∇u|^{p−2}/h² + max|f'|) ≤ 1/2.
double flow_step(const GridField& u, const CoefficientField& a, const ProblemParams& prm) {
  const Grid& g = u.grid;
  double amax = 0.0;
  for (double v : a.values) amax = std::max(amax, v);
  double gmax = 0.0;
  for (const Point& gr : node_gradients(u)) {
    double s = 0.0;
    for (int k = 0; k < g.dim(); ++k) s += gr[k] * gr[k];
    gmax = std::max(gmax, std::sqrt(s));
  }
  const double h = g.min_h();
  const double diff = 2.0 * g.dim() * amax * std::max(prm.p - 1.0, 1.0) *
                      std::pow(std::max(gmax, prm.delta_reg), prm.p - 2.0) / (h * h);
  const double umax = std::max(u.max(), 0.0);
  const double react = prm.m1 * 1.875 / prm.eps + prm.m2 * (prm.lambda - 1.0) * std::pow(umax, prm.lambda - 2.0);
  return 0.5 / (diff + react);
}

}  // namespace

SolveResult solve_penalized(const CoefficientField& a, const ProblemParams& params,
                            const GridField& init, const SolverOptions& options) {
  params.validate();
  require_same_grid(init.grid, a.grid, "solve_penalized");
  const Grid& g = init.grid;
  const System sys = interior_system(g);

  SolveResult out;
  out.u = init;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (g.is_boundary(i)) out.u[i] = 0.0;
  require_finite(out.u, "initial guess");

  GridField res = residual(out.u, a, params);
  double rnorm = res.sup_norm();
  double rl2 = l2(res);
  int flow_budget = options.max_flow;

  while (rnorm > params.tol_res) {
    if (out.iterations >= options.max_newton) break;
    ++out.iterations;
    bool advanced = false;
    if (auto d = newton_direction(out.u, a, params, sys, res)) {
      double t = 1.0;
      while (t >= options.min_step) {
        GridField trial = out.u;
        for (std::size_t k = 0; k < sys.unknowns.size(); ++k)
          trial[sys.unknowns[k]] += t * (*d)[static_cast<Eigen::Index>(k)];
        if (trial.all_finite()) {
          GridField tres = residual(trial, a, params);
          const double tl2 = l2(tres);
          if (tl2 <= (1.0 - 1e-4 * t) * rl2) {
            out.u = std::move(trial);
            res = std::move(tres);
            rl2 = tl2;
            rnorm = res.sup_norm();
            advanced = true;
            break;
          }
        }
        t *= 0.5;
      }
    }
    if (advanced) continue;

    // Newton stalled: explicit flow on the energy, then retry Newton.
    if (flow_budget <= 0) break;
    const int chunk = std::min(options.flow_chunk, flow_budget);
    for (int s = 0; s < chunk; ++s) {
      const double dt = flow_step(out.u, a, params);
      for (std::size_t node : sys.unknowns) out.u[node] += dt * res[node];
      require_finite(out.u, "gradient flow");
      res = residual(out.u, a, params);
    }
    flow_budget -= chunk;
    out.flow_steps += chunk;
    rnorm = res.sup_norm();
    rl2 = l2(res);
  }
  require_finite(out.u, "solve_penalized");

  out.converged = rnorm <= params.tol_res;
  out.min_before_clamp = out.u.min();
  if (out.converged) {
    // Rounding-scale undershoot is clamped; the residual is re-checked.
    bool clamped = false;
    for (double& v : out.u.values)
      if (v < 0.0) {
        v = 0.0;
        clamped = true;
      }
    if (clamped) {
      rnorm = residual_norm(out.u, a, params);
      out.converged = rnorm <= params.tol_res;
    }
  }
  out.residual_norm = rnorm;
  out.energy = energy(out.u, a, params);
  out.nontrivial = out.u.sup_norm() > options.trivial_factor * params.eps;
  return out;
}

std::pair<double, double> interior_norms(const GridField& u, double margin) {
  const Grid& g = u.grid;
  const auto grad = node_gradients(u);
  double su = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (g.is_boundary(i) || g.distance_to_boundary(g.point(i)) < margin) continue;
    su = std::max(su, std::abs(u[i]));
    double s = 0.0;
    for (int k = 0; k < g.dim(); ++k) s += grad[i][k] * grad[i][k];
    sg = std::max(sg, std::sqrt(s));
  }
  return {su, sg};
}

ContinuationResult continuation_solve(const CoefficientField& a, const ProblemParams& params,
                                      double eps0, double factor, int steps, const GridField* init,
                                      const SolverOptions& options) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw ConfigError("continuation needs 0 < eps0 < 1");
  if (!(factor > 0.0 && factor < 1.0)) throw ConfigError("continuation factor must lie in (0, 1)");
  if (steps < 1) throw ConfigError("continuation needs at least one step");

  ContinuationResult out;
  const Grid& g = a.grid;
  double shortest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < g.dim(); ++k) shortest = std::min(shortest, g.hi(k) - g.lo(k));
  out.interior_margin = 0.1 * shortest;

  for (int k = 0; k < steps; ++k) out.schedule.push_back(eps0 * std::pow(factor, k));

  GridField start;
  if (init) {
    start = *init;
  } else {
    const DescentSeed seed = find_descent_seed(a, params.with_eps(eps0), default_bump(g));
    start = seed.w0;
    for (double& v : start.values) v *= seed.t_peak;
  }

  for (int k = 0; k < steps; ++k) {
    const ProblemParams pk = params.with_eps(out.schedule[k]);
    SolveResult r = solve_penalized(a, pk, k == 0 ? start : out.solutions.back().u, options);
    const auto [su, sg] = interior_norms(r.u, out.interior_margin);
    if (!out.solutions.empty()) {
      double d = 0.0;
      for (std::size_t i = 0; i < r.u.size(); ++i)
        d = std::max(d, std::abs(r.u[i] - out.solutions.back().u[i]));
      out.drift.push_back(d);
    }
    out.sup_norm_track.push_back(su);
    out.grad_sup_track.push_back(sg);
    const bool ok = r.converged;
    out.solutions.push_back(std::move(r));
    if (!ok) {
      out.failed_index = k;
      break;
    }
  }
  return out;
}

}  // namespace pobs
