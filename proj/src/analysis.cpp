#include "pobs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pobs/operator.hpp"
#include "pobs/penalty.hpp"

namespace pobs {

double c2_constant(const ProblemParams& params, double a1) {
  const double p = params.p;
  return (p - 1.0) / p * std::pow(params.m1 / (2.0 * params.dim * (a1 + 1.0)), 1.0 / (p - 1.0));
}

double r2_bound(const ProblemParams& params, double a1, double c1_growth, double r1) {
  if (!(c1_growth > 0.0) || !(r1 > 0.0) || !(a1 > 0.0))
    throw ParameterError("r2_bound needs positive a1, c1 and r1");
  const double p = params.p, lambda = params.lambda;
  const double third = std::pow(params.m1 / (2.0 * params.m2 * std::pow(c1_growth, lambda - 1.0)),
                                (p - 1.0) / (p * (lambda - 1.0)));
  return std::min({r1, 1.0 / a1, third});
}

std::vector<double> geometric_radii(double r_lo, double r_hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(n == 1 ? r_lo : r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n - 1)));
  return out;
}

namespace {

// Points on the sphere of radius r around c, dense relative to the grid.
std::vector<Point> sphere_points(const Grid& g, const Point& c, double r) {
  std::vector<Point> pts;
  const double h = g.min_h();
  if (g.dim() == 1) {
    pts.push_back({c[0] - r, 0, 0});
    pts.push_back({c[0] + r, 0, 0});
  } else if (g.dim() == 2) {
    const int n = std::max(64, static_cast<int>(std::ceil(16.0 * M_PI * r / h)));
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * M_PI * i / n;
      pts.push_back({c[0] + r * std::cos(th), c[1] + r * std::sin(th), 0});
    }
  } else {
    const int n = std::max(256, static_cast<int>(std::ceil(32.0 * M_PI * r * r / (h * h))));
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double rho = std::sqrt(1.0 - z * z);
      const double th = golden * i;
      pts.push_back({c[0] + r * rho * std::cos(th), c[1] + r * rho * std::sin(th), c[2] + r * z});
    }
  }
  return pts;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double dist(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// Index box of nodes within distance r of c.
void node_box(const Grid& g, const Point& c, double r, Index& lo, Index& hi) {
  lo = Index{};
  hi = Index{};
  for (int k = 0; k < g.dim(); ++k) {
    lo[k] = std::max(0, static_cast<int>(std::floor((c[k] - r - g.lo(k)) / g.h(k))));
    hi[k] = std::min(g.cells(k), static_cast<int>(std::ceil((c[k] + r - g.lo(k)) / g.h(k))));
  }
}

template <class F>
void for_each_in_box(const Index& lo, const Index& hi, F&& f) {
  Index z = lo;
  for (z[0] = lo[0]; z[0] <= hi[0]; ++z[0])
    for (z[1] = lo[1]; z[1] <= hi[1]; ++z[1])
      for (z[2] = lo[2]; z[2] <= hi[2]; ++z[2]) f(z);
}

}  // namespace

GrowthFit growth_fit(const GridField& u, const Point& center, const std::vector<double>& radii) {
  const Grid& g = u.grid;
  GrowthFit fit;
  fit.center = center;
  GridField gradmag(g);
  const auto grad = node_gradients(u);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    double s = 0.0;
    for (int k = 0; k < g.dim(); ++k) s += grad[i][k] * grad[i][k];
    gradmag[i] = std::sqrt(s);
  }
  std::vector<double> grad_r, grad_v;
  for (double r : radii) {
    if (!(r > 0.0)) throw FitError("growth radii must be positive");
    if (g.distance_to_boundary(center) < r) throw DomainError("growth ball leaves the box");
    double su = 0.0, sg = 0.0;
    for (const Point& x : sphere_points(g, center, r)) {
      su = std::max(su, interpolate(u, x));
      sg = std::max(sg, interpolate(gradmag, x));
    }
    if (su > 0.0) {
      fit.radii.push_back(r);
      fit.sup_values.push_back(su);
      fit.grad_sup_values.push_back(sg);
      if (sg > 0.0) {
        grad_r.push_back(r);
        grad_v.push_back(sg);
      }
    }
  }
  if (fit.radii.size() < 4) throw FitError("growth fit needs at least 4 radii with positive sup");
  const auto [rmin, rmax] = std::minmax_element(fit.radii.begin(), fit.radii.end());
  if (*rmax < 2.0 * *rmin) throw FitError("growth radii must span at least a factor 2");
  const LineFit f = fit_loglog(fit.radii, fit.sup_values);
  fit.slope = f.slope;
  fit.c1_growth = std::exp(f.intercept);
  if (grad_r.size() >= 2) fit.grad_slope = fit_loglog(grad_r, grad_v).slope;
  return fit;
}

NondegeneracyReport nondegeneracy_check(const GridField& u, const FreeBoundary& fb,
                                        const std::vector<double>& radii,
                                        const ProblemParams& params, double a1, double r_max,
                                        double slack) {
  require_same_grid(u.grid, fb.grid, "nondegeneracy_check");
  const Grid& g = u.grid;
  if (fb.empty()) throw RangeError("non-degeneracy needs a non-empty free boundary");
  NondegeneracyReport rep;
  rep.c2_theoretical = c2_constant(params, a1);
  rep.slack = slack;
  const double h = g.max_h();
  for (double r : radii)
    if (r >= 4.0 * h * (1.0 - 1e-12) && (r_max <= 0.0 || r <= r_max)) rep.radii.push_back(r);
  if (rep.radii.empty()) throw RangeError("no admissible non-degeneracy radius in [4h, r2/2]");

  const double beta = params.growth_exponent();
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (const Point& y : fb.points) {
    for (double r : rep.radii) {
      if (g.distance_to_boundary(y) < r + h) throw DomainError("non-degeneracy ball leaves the box");
      NondegeneracyEntry e;
      e.point = y;
      e.radius = r;
      Index lo, hi;
      node_box(g, y, r + h, lo, hi);
      for_each_in_box(lo, hi, [&](const Index& z) {
        const std::size_t f = g.flat(z);
        const double d = dist(g.point(f), y, g.dim());
        if (d < r - 0.5 * h || d >= r + 0.5 * h || !(u[f] > 0.0)) return;
        e.measured = std::max(e.measured, u[f]);
        e.margin = std::max(e.margin, u[f] / (rep.c2_theoretical * std::pow(d, beta)));
      });
      e.pass = e.margin >= slack;
      rep.min_margin = std::min(rep.min_margin, e.margin);
      rep.entries.push_back(e);
    }
  }
  rep.all_pass = std::all_of(rep.entries.begin(), rep.entries.end(),
                             [](const NondegeneracyEntry& e) { return e.pass; });
  return rep;
}

BarrierCheck barrier_comparison_check(const ProblemParams& params, const CoefficientField& a,
                                      const Point& y, double r) {
  params.validate();
  const Grid& g = a.grid;
  if (!(r > 0.0)) throw DomainError("barrier radius must be positive");
  if (r > 1.0 / a.a1) throw DomainError("barrier radius exceeds 1/a1");
  if (g.distance_to_boundary(y) < r) throw DomainError("barrier ball leaves the box");
  BarrierCheck out;
  out.c2 = c2_constant(params, a.a1);
  out.bound = 0.5 * params.m1;
  out.slack = 5.0 * g.max_h();
  const double beta = params.growth_exponent();
  const GridField v = sample(g, [&](const Point& x) { return out.c2 * std::pow(dist(x, y, g.dim()), beta); });
  const GridField div = apply_divergence_form(v, a, params.p, params.delta_reg);
  out.max_divergence = -std::numeric_limits<double>::infinity();
  Index lo, hi;
  node_box(g, y, r, lo, hi);
  for_each_in_box(lo, hi, [&](const Index& z) {
    const std::size_t f = g.flat(z);
    if (g.is_boundary(f)) return;
    const double d = dist(g.point(f), y, g.dim());
    if (d < 2.0 * g.max_h() || d > r) return;
    out.max_divergence = std::max(out.max_divergence, div[f]);
    ++out.nodes;
  });
  if (out.nodes == 0) throw DomainError("barrier annulus contains no nodes");
  out.pass = out.max_divergence <= out.bound + out.slack;
  return out;
}

RecursionTrace degiorgi_iterate(double C, double D, double zeta, double g0, int n_max) {
  if (!(C > 0.0) || !(D > 1.0) || !(zeta > 0.0) || !(g0 >= 0.0) || n_max < 0)
    throw ParameterError("recursion needs C > 0, D > 1, zeta > 0, g0 >= 0, n_max >= 0");
  RecursionTrace t;
  t.C = C;
  t.D = D;
  t.zeta = zeta;
  t.g0 = g0;
  t.threshold = std::pow(C, -1.0 / zeta) * std::pow(D, -1.0 / (zeta * zeta));
  t.sequence.push_back(g0);
  double g = g0;
  for (int n = 0; n < n_max; ++n) {
    g = C * std::pow(D, n) * std::pow(g, 1.0 + zeta);
    t.sequence.push_back(g);
    if (!std::isfinite(g) || g > g0) t.diverged = true;
    if (!std::isfinite(g)) break;
  }
  t.converged = g0 == 0.0 || (static_cast<int>(t.sequence.size()) == n_max + 1 &&
                              t.sequence.back() < 1e-12 * g0);
  return t;
}

double c3_constant(const ProblemParams& params, double a1) {
  const double N = params.dim, pm1 = params.p - 1.0;
  return 2.0 * N * N * a1 * a1 * pm1 * pm1;
}

PointwiseReport pointwise_inequality_check(const GridField& u, double a1, const ProblemParams& params) {
  const Grid& g = u.grid;
  PointwiseReport rep;
  rep.c3 = c3_constant(params, a1);
  const auto grad = node_gradients(u);
  const auto hess = hessian_norms(u);
  const double p = params.p;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Index idx = g.multi(i);
    bool inside = true;
    for (int k = 0; k < g.dim(); ++k)
      if (idx[k] < 2 || idx[k] > g.cells(k) - 2) inside = false;
    if (!inside) continue;
    const double s = u[i];
    const double f = params.m1 * chi_eps(s, params.eps) - params.m2 * std::pow(std::max(s, 0.0), params.lambda - 1.0);
    const double lhs = f * f;
    double gn = 0.0;
    for (int k = 0; k < g.dim(); ++k) gn += grad[i][k] * grad[i][k];
    gn = std::sqrt(gn);
    const double t = std::pow(gn, p - 2.0) * hess[i];
    const double rhs = rep.c3 * (std::pow(gn, 2.0 * (p - 1.0)) + t * t);
    ++rep.nodes_checked;
    if (lhs == 0.0) continue;
    const double ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_point = g.point(i);
    }
  }
  return rep;
}

UniformBounds uniform_bounds_report(const ContinuationResult& cont, double interior_margin) {
  UniformBounds out;
  out.interior_margin = interior_margin;
  for (const SolveResult& s : cont.solutions) {
    const auto [su, sg] = interior_norms(s.u, interior_margin);
    out.sup_track.push_back(su);
    out.grad_track.push_back(sg);
    out.combined_track.push_back(su + sg);
    out.global_sup_track.push_back(s.u.sup_norm());
  }
  if (!out.combined_track.empty()) {
    const auto [mn, mx] = std::minmax_element(out.combined_track.begin(), out.combined_track.end());
    out.c1 = *mx;
    out.relative_spread = *mx > 0.0 ? (*mx - *mn) / *mx : 0.0;
  }
  return out;
}

namespace {

double holder_estimate(const GridField& u, double alpha, double margin, int max_offset) {
  const Grid& g = u.grid;
  const auto grad = node_gradients(u);
  double best = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (g.distance_to_boundary(g.point(i)) < margin) continue;
    const Index idx = g.multi(i);
    for (int k = 0; k < g.dim(); ++k)
      for (int m = 1; m <= max_offset; ++m) {
        if (idx[k] + m > g.cells(k)) break;
        const std::size_t j = i + m * g.stride(k);
        if (g.distance_to_boundary(g.point(j)) < margin) break;
        double dg = 0.0;
        for (int l = 0; l < g.dim(); ++l) dg += (grad[i][l] - grad[j][l]) * (grad[i][l] - grad[j][l]);
        best = std::max(best, std::sqrt(dg) / std::pow(m * g.h(k), alpha));
      }
  }
  return best;
}

GridField coarsen(const GridField& u) {
  const Grid& g = u.grid;
  std::vector<int> cells;
  for (int k = 0; k < g.dim(); ++k) {
    if (g.cells(k) % 2 != 0) throw ShapeError("Hölder probe needs even cell counts");
    cells.push_back(g.cells(k) / 2);
  }
  Grid c(g.extents(), cells);
  GridField out(c);
  for (std::size_t i = 0; i < c.node_count(); ++i) {
    Index idx = c.multi(i);
    for (int k = 0; k < g.dim(); ++k) idx[k] *= 2;
    out[i] = u[g.flat(idx)];
  }
  return out;
}

}  // namespace

HolderProbe holder_seminorm_probe(const GridField& u, const std::vector<double>& alpha_grid,
                                  double window_margin, double factor, int max_offset) {
  HolderProbe probe;
  probe.factor = factor;
  const GridField coarse = coarsen(u);
  std::vector<double> alphas = alpha_grid;
  std::sort(alphas.begin(), alphas.end());
  bool prefix = true;
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("Hölder exponents must lie in (0, 1]");
    HolderRow row;
    row.alpha = alpha;
    row.fine = holder_estimate(u, alpha, window_margin, max_offset);
    row.coarse = holder_estimate(coarse, alpha, window_margin, std::max(1, max_offset / 2));
    row.stable = row.fine <= factor * row.coarse;
    prefix = prefix && row.stable;
    if (prefix) probe.stable_alpha = alpha;
    probe.rows.push_back(row);
  }
  return probe;
}

}  // namespace pobs
