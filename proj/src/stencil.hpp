#pragma once

// Quadrant stencil shared by the operator, the energy and the Newton Jacobian.
//
// Every cell contributes one "quadrant" per corner node: the gradient built
// from one-sided differences between that corner and its N neighbours inside
// the cell. Each quadrant carries weight cell_volume / 2^N, so the discrete
// Dirichlet energy is Σ_q w (a_node/p) |g_q|^p and the operator is its exact
// negative gradient divided by the nodal volume. At p = 2 this collapses to the
// (2N+1)-point Laplacian with arithmetic-mean face coefficients.

#include <array>
#include <cstddef>

#include "pobs/core.hpp"

namespace pobs::detail {

struct Quadrant {
  std::size_t node = 0;
  std::array<std::size_t, kMaxDim> nbr{};
  std::array<double, kMaxDim> dir{};  // ±1/h_k: g_k = dir_k (u[nbr_k] − u[node])
};

inline double quadrant_weight(const Grid& g) {
  return g.cell_volume() / static_cast<double>(1 << g.dim());
}

template <class F>
void for_each_quadrant(const Grid& g, F&& f) {
  const int dim = g.dim();
  const int corners = 1 << dim;
  Index lower{};
  std::array<int, kMaxDim> ncell{1, 1, 1};
  for (int k = 0; k < dim; ++k) ncell[k] = g.cells(k);
  Quadrant q;
  for (lower[0] = 0; lower[0] < ncell[0]; ++lower[0])
    for (lower[1] = 0; lower[1] < ncell[1]; ++lower[1])
      for (lower[2] = 0; lower[2] < ncell[2]; ++lower[2]) {
        const std::size_t base = g.flat(lower);
        for (int c = 0; c < corners; ++c) {
          std::size_t node = base;
          for (int k = 0; k < dim; ++k)
            if ((c >> k) & 1) node += g.stride(k);
          q.node = node;
          for (int k = 0; k < dim; ++k) {
            if ((c >> k) & 1) {
              q.nbr[k] = node - g.stride(k);
              q.dir[k] = -1.0 / g.h(k);
            } else {
              q.nbr[k] = node + g.stride(k);
              q.dir[k] = 1.0 / g.h(k);
            }
          }
          f(q);
        }
      }
}

inline Point quadrant_gradient(const Quadrant& q, int dim, const std::vector<double>& u) {
  Point gq{};
  for (int k = 0; k < dim; ++k) gq[k] = q.dir[k] * (u[q.nbr[k]] - u[q.node]);
  return gq;
}

inline double squared_norm(const Point& v, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += v[k] * v[k];
  return s;
}

/// ∂E_grad/∂u accumulated into `out` (no nodal-volume scaling).
void accumulate_dirichlet_gradient(const GridField& u, const std::vector<double>& a, double p,
                                   double delta_reg, std::vector<double>& out);

/// Σ_q w (a/p)(|g_q|_δ^p − δ^p).
double dirichlet_energy(const GridField& u, const std::vector<double>& a, double p, double delta_reg);

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Hessian entries of the Dirichlet energy restricted to nodes with
/// unknown_of[node] >= 0 (row/col are unknown numbers).
void dirichlet_hessian(const GridField& u, const std::vector<double>& a, double p, double delta_reg,
                       const std::vector<long>& unknown_of, std::vector<Triplet>& out);

}  // namespace pobs::detail
