#pragma once

// Discrete variable-coefficient p-Laplacian in divergence form and the
// residual of the penalized equation.

#include "pobs/core.hpp"

namespace pobs {

/// |g|_δ^{p−2} g with |g|_δ = sqrt(|g|² + δ²). Throws NumericError on
/// non-finite input and ParameterError on p < 2 or δ < 0.
Point p_flux(const Point& g, double p, double delta_reg);

/// div(a |∇u|^{p−2} ∇u) at interior nodes, zero on boundary nodes.
///
/// Face fluxes are assembled from quadrant gradients (one-sided differences
/// from a node into each adjacent cell); the operator is exactly
/// −(1/cell_volume)·∂/∂u of the discrete Dirichlet energy used by energy().
/// Throws ShapeError when u and a live on different grids.
GridField apply_divergence_form(const GridField& u, const CoefficientField& a, double p,
                                double delta_reg);

/// apply_divergence_form(u) − m1 χ_ε(u) + m2 (u⁺)^{λ−1} at interior nodes.
GridField residual(const GridField& u, const CoefficientField& a, const ProblemParams& params);

/// Sup norm of the residual over interior nodes.
double residual_norm(const GridField& u, const CoefficientField& a, const ProblemParams& params);

/// N C^{p−1} (p/(p−1))^{p−1}: exact div(|∇v|^{p−2}∇v) for v = C|x|^{p/(p−1)}.
double barrier_operator_value(double C, double p, int dim);

}  // namespace pobs
