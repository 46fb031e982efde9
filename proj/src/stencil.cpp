#include "stencil.hpp"

#include <cmath>

namespace pobs::detail {

void accumulate_dirichlet_gradient(const GridField& u, const std::vector<double>& a, double p,
                                   double delta_reg, std::vector<double>& out) {
  const Grid& g = u.grid;
  const int dim = g.dim();
  const double w = quadrant_weight(g);
  const double d2 = delta_reg * delta_reg;
  for_each_quadrant(g, [&](const Quadrant& q) {
    const Point gq = quadrant_gradient(q, dim, u.values);
    const double mod = std::sqrt(squared_norm(gq, dim) + d2);
    const double scale = w * a[q.node] * std::pow(mod, p - 2.0);
    for (int k = 0; k < dim; ++k) {
      const double c = scale * gq[k] * q.dir[k];
      out[q.nbr[k]] += c;
      out[q.node] -= c;
    }
  });
}

double dirichlet_energy(const GridField& u, const std::vector<double>& a, double p, double delta_reg) {
  const Grid& g = u.grid;
  const int dim = g.dim();
  const double w = quadrant_weight(g);
  const double d2 = delta_reg * delta_reg;
  const double floor_term = std::pow(delta_reg, p);
  double total = 0.0;
  for_each_quadrant(g, [&](const Quadrant& q) {
    const Point gq = quadrant_gradient(q, dim, u.values);
    const double mod = std::sqrt(squared_norm(gq, dim) + d2);
    total += w * a[q.node] / p * (std::pow(mod, p) - floor_term);
  });
  return total;
}

void dirichlet_hessian(const GridField& u, const std::vector<double>& a, double p, double delta_reg,
                       const std::vector<long>& unknown_of, std::vector<Triplet>& out) {
  const Grid& g = u.grid;
  const int dim = g.dim();
  const double w = quadrant_weight(g);
  const double d2 = delta_reg * delta_reg;
  for_each_quadrant(g, [&](const Quadrant& q) {
    const Point gq = quadrant_gradient(q, dim, u.values);
    const double mod2 = squared_norm(gq, dim) + d2;
    const double mod = std::sqrt(mod2);
    // d²/dg² of |g|^p / p = |g|^{p-2} I + (p-2)|g|^{p-4} g gᵀ
    const double iso = std::pow(mod, p - 2.0);
    const double aniso = (p != 2.0 && mod > 0.0) ? (p - 2.0) * std::pow(mod, p - 4.0) : 0.0;
    const double wa = w * a[q.node];

    // dg_k/du: +dir_k at nbr_k, −dir_k at node.
    std::array<std::size_t, kMaxDim + 1> nodes{};
    std::array<std::array<double, kMaxDim>, kMaxDim + 1> jac{};  // jac[m][k] = dg_k/du_{nodes[m]}
    nodes[0] = q.node;
    for (int k = 0; k < dim; ++k) {
      nodes[k + 1] = q.nbr[k];
      jac[0][k] = -q.dir[k];
      jac[k + 1][k] = q.dir[k];
    }
    for (int m = 0; m <= dim; ++m) {
      const long r = unknown_of[nodes[m]];
      if (r < 0) continue;
      for (int n = 0; n <= dim; ++n) {
        const long c = unknown_of[nodes[n]];
        if (c < 0) continue;
        double dot = 0.0, gm = 0.0, gn = 0.0;
        for (int k = 0; k < dim; ++k) {
          dot += jac[m][k] * jac[n][k];
          gm += gq[k] * jac[m][k];
          gn += gq[k] * jac[n][k];
        }
        const double v = wa * (iso * dot + aniso * gm * gn);
        if (v != 0.0) out.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), v});
      }
    }
  });
}

}  // namespace pobs::detail
