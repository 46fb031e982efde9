#include "pobs/energy.hpp"

#include <algorithm>
#include <cmath>

#include "pobs/operator.hpp"
#include "pobs/penalty.hpp"
#include "stencil.hpp"

namespace pobs {

EnergyBreakdown energy(const GridField& u, const CoefficientField& a, const ProblemParams& params) {
  params.validate();
  require_same_grid(u.grid, a.grid, "energy");
  EnergyBreakdown e;
  e.gradient_term = detail::dirichlet_energy(u, a.values, params.p, params.delta_reg);
  const double vol = u.grid.cell_volume();
  double pen = 0.0, react = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.grid.is_boundary(i)) continue;
    pen += phi_eps(u[i], params.eps);
    react += std::pow(std::max(u[i], 0.0), params.lambda);
  }
  e.penalty_term = params.m1 * pen * vol;
  e.reaction_term = -(params.m2 / params.lambda) * react * vol;
  e.total = e.gradient_term + e.penalty_term + e.reaction_term;
  return e;
}

GridField energy_gradient(const GridField& u, const CoefficientField& a, const ProblemParams& params) {
  GridField r = residual(u, a, params);
  const double vol = u.grid.cell_volume();
  for (double& v : r.values) v = -v * vol;
  return r;
}

std::vector<double> ray_profile(const GridField& w, const CoefficientField& a,
                                const ProblemParams& params, const std::vector<double>& t_values) {
  const bool has_positive_part =
      std::any_of(w.values.begin(), w.values.end(), [](double v) { return v > 0.0; });
  if (!has_positive_part)
    throw SeedError("ray direction has no positive part; the reaction term vanishes along it");
  std::vector<double> out;
  out.reserve(t_values.size());
  GridField tw(w.grid);
  for (double t : t_values) {
    if (!(t >= 0.0)) throw ParameterError("ray parameter t must be non-negative");
    for (std::size_t i = 0; i < w.size(); ++i) tw[i] = t * w[i];
    out.push_back(energy(tw, a, params).total);
  }
  return out;
}

double mountain_pass_floor(const ProblemParams& params, double a0, double sobolev_est) {
  const double p = params.p, lambda = params.lambda;
  if (!(lambda > p)) throw ParameterError("mountain-pass floor needs lambda > p");
  if (!(a0 > 0.0) || !(sobolev_est > 0.0) || !(params.m2 > 0.0))
    throw ParameterError("mountain-pass floor needs positive a0, m2 and S");
  return (lambda - p) / (lambda * p) * std::pow(a0, lambda / (lambda - p)) *
         std::pow(params.m2, p / (p - lambda)) * std::pow(sobolev_est, lambda * p / (lambda - p));
}

namespace {

struct Quotient {
  double log_value;
  std::vector<double> grad;  // ∂ log R / ∂u on interior nodes
};

Quotient log_quotient(const GridField& u, const std::vector<double>& ones, double p, double lambda) {
  const double vol = u.grid.cell_volume();
  const double dir = p * detail::dirichlet_energy(u, ones, p, 0.0);  // Σ w |g|^p
  std::vector<double> ddir(u.size(), 0.0);
  detail::accumulate_dirichlet_gradient(u, ones, p, 0.0, ddir);
  double leb = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!u.grid.is_boundary(i)) leb += vol * std::pow(std::abs(u[i]), lambda);
  Quotient q;
  q.log_value = std::log(dir) / p - std::log(leb) / lambda;
  q.grad.assign(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.grid.is_boundary(i)) continue;
    const double dleb = vol * lambda * std::pow(std::abs(u[i]), lambda - 1.0) * (u[i] < 0 ? -1.0 : 1.0);
    q.grad[i] = ddir[i] / dir - dleb / (lambda * leb);  // ddir = ∂(dir/p)/∂u
  }
  return q;
}

}  // namespace

SobolevEstimate estimate_sobolev_constant(const Grid& grid, double p, double lambda,
                                          int max_iterations) {
  if (!(p >= 2.0) || !(lambda > p)) throw ParameterError("Sobolev estimate needs 2 <= p < lambda");
  const std::vector<double> ones(grid.node_count(), 1.0);
  GridField u = sample(grid, [&grid](const Point& x) {
    double v = 1.0;
    for (int k = 0; k < grid.dim(); ++k)
      v *= std::sin(M_PI * (x[k] - grid.lo(k)) / (grid.hi(k) - grid.lo(k)));
    return v;
  });
  for (std::size_t i = 0; i < u.size(); ++i)
    if (grid.is_boundary(i)) u[i] = 0.0;

  Quotient cur = log_quotient(u, ones, p, lambda);
  double step = 1e-3;
  int it = 0;
  for (; it < max_iterations; ++it) {
    double gnorm = 0.0;
    for (double g : cur.grad) gnorm += g * g;
    if (gnorm < 1e-24) break;
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      GridField trial = u;
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] -= step * cur.grad[i];
      Quotient next = log_quotient(trial, ones, p, lambda);
      if (next.log_value < cur.log_value - 1e-4 * step * gnorm) {
        u = std::move(trial);
        cur = std::move(next);
        accepted = true;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) break;
    // keep the iterate normalised; the quotient is scale invariant
    const double s = u.sup_norm();
    if (s > 0.0)
      for (double& v : u.values) v /= s;
    cur = log_quotient(u, ones, p, lambda);
  }
  return {std::exp(cur.log_value), it};
}

}  // namespace pobs
