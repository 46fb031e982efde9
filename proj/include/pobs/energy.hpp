#pragma once

// Discrete penalized energy
//   J_ε(u) = ∫ (a/p)|∇u|^p + m1 Φ_ε(u) − (m2/λ)(u⁺)^λ
// built on the same quadrant stencil as the operator, so its nodal gradient
// equals −residual·cell_volume exactly.

#include <vector>

#include "pobs/core.hpp"

namespace pobs {

struct EnergyBreakdown {
  double gradient_term = 0.0;
  double penalty_term = 0.0;
  double reaction_term = 0.0;
  double total = 0.0;
};

EnergyBreakdown energy(const GridField& u, const CoefficientField& a, const ProblemParams& params);

/// ∂J_ε/∂u at interior nodes (zero on the boundary).
GridField energy_gradient(const GridField& u, const CoefficientField& a, const ProblemParams& params);

/// J_ε(t·w) for each t. Throws SeedError when w⁺ ≡ 0 and ParameterError on t < 0.
std::vector<double> ray_profile(const GridField& w, const CoefficientField& a,
                                const ProblemParams& params, const std::vector<double>& t_values);

/// ((λ−p)/(λp)) a0^{λ/(λ−p)} m2^{p/(p−λ)} S^{λp/(λ−p)}: the lower bar for the
/// mountain-pass level given an embedding-constant estimate S.
double mountain_pass_floor(const ProblemParams& params, double a0, double sobolev_est);

struct SobolevEstimate {
  double value = 0.0;  // min found of ‖∇u‖_p / ‖u‖_λ
  int iterations = 0;
};

/// Estimates S = inf ‖∇u‖_p / ‖u‖_λ over grid functions vanishing on ∂Ω by
/// gradient descent on the log-quotient. Any iterate bounds S from above.
SobolevEstimate estimate_sobolev_constant(const Grid& grid, double p, double lambda,
                                          int max_iterations = 400);

}  // namespace pobs
