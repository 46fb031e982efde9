#include "pobs/operator.hpp"

#include <algorithm>
#include <cmath>

#include "pobs/penalty.hpp"
#include "stencil.hpp"

namespace pobs {

Point p_flux(const Point& g, double p, double delta_reg) {
  if (!(p >= 2.0)) throw ParameterError("p_flux requires p >= 2");
  if (!(delta_reg >= 0.0)) throw ParameterError("p_flux requires delta_reg >= 0");
  double n2 = delta_reg * delta_reg;
  for (double c : g) {
    if (!std::isfinite(c)) throw NumericError("p_flux: non-finite gradient component");
    n2 += c * c;
  }
  const double scale = std::pow(std::sqrt(n2), p - 2.0);
  return {scale * g[0], scale * g[1], scale * g[2]};
}

GridField apply_divergence_form(const GridField& u, const CoefficientField& a, double p,
                                double delta_reg) {
  require_same_grid(u.grid, a.grid, "apply_divergence_form");
  if (!(p >= 2.0)) throw ParameterError("apply_divergence_form requires p >= 2");
  if (!(delta_reg >= 0.0)) throw ParameterError("apply_divergence_form requires delta_reg >= 0");
  std::vector<double> acc(u.size(), 0.0);
  detail::accumulate_dirichlet_gradient(u, a.values, p, delta_reg, acc);
  GridField out(u.grid);
  const double inv_vol = 1.0 / u.grid.cell_volume();
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!u.grid.is_boundary(i)) out[i] = -acc[i] * inv_vol;
  return out;
}

GridField residual(const GridField& u, const CoefficientField& a, const ProblemParams& params) {
  params.validate();
  GridField out = apply_divergence_form(u, a, params.p, params.delta_reg);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.grid.is_boundary(i)) continue;
    const double up = std::max(u[i], 0.0);
    out[i] += -params.m1 * chi_eps(u[i], params.eps) + params.m2 * std::pow(up, params.lambda - 1.0);
  }
  return out;
}

double residual_norm(const GridField& u, const CoefficientField& a, const ProblemParams& params) {
  return residual(u, a, params).sup_norm();
}

double barrier_operator_value(double C, double p, int dim) {
  if (!(C > 0.0)) throw ParameterError("barrier constant must be positive");
  if (!(p >= 2.0)) throw ParameterError("barrier requires p >= 2");
  if (dim < 1 || dim > kMaxDim) throw ParameterError("barrier dimension must be 1, 2 or 3");
  return dim * std::pow(C, p - 1.0) * std::pow(p / (p - 1.0), p - 1.0);
}

}  // namespace pobs
