#pragma once

// Nontrivial solutions of the penalized problem and the ε → 0 continuation.

#include <vector>

#include "pobs/core.hpp"
#include "pobs/energy.hpp"

namespace pobs {

/// Radial cos² bump: amplitude·cos²(π|x−c|/(2R)) for |x−c| < R, 0 elsewhere.
struct BumpSpec {
  Point center{};
  double radius = 0.25;
  double amplitude = 1.0;
  bool operator==(const BumpSpec&) const = default;
};

/// Bump centred in the box with radius a quarter of the shortest side.
BumpSpec default_bump(const Grid& grid);

/// Bump sampled on the grid with zero boundary values.
GridField make_bump(const Grid& grid, const BumpSpec& spec);

struct DescentSeed {
  GridField w0;          // sup-normalised direction
  double t0 = 0.0;       // first doubling with J_ε(t0·w0) < 0
  double t_peak = 0.0;   // maximiser of t ↦ J_ε(t·w0) on [0, t0]
  double peak_energy = 0.0;
  int doublings = 0;
};

/// Doubles t from 1 along the ray until J_ε(t·w0) < 0. Throws SeedError when
/// the bump has no positive part or 60 doublings do not change the sign.
DescentSeed find_descent_seed(const CoefficientField& a, const ProblemParams& params,
                              const BumpSpec& seed);

struct SolverOptions {
  int max_newton = 500;
  int max_flow = 5000;
  int flow_chunk = 200;           // flow steps taken before Newton is retried
  double trivial_factor = 10.0;   // nontrivial iff ‖u‖∞ > trivial_factor·ε
  double min_step = 1.0 / 1024;   // line-search floor before declaring stagnation
};

struct SolveResult {
  GridField u;
  double residual_norm = 0.0;
  EnergyBreakdown energy;
  int iterations = 0;        // Newton steps
  int flow_steps = 0;
  bool converged = false;
  bool nontrivial = false;
  double min_before_clamp = 0.0;
};

/// Damped Newton on the residual (Armijo backtracking on its Euclidean norm),
/// with explicit gradient-flow fallback when the line search stalls. Hitting
/// the iteration caps returns converged = false. Throws NumericError when an
/// iterate becomes non-finite and ShapeError on grid mismatch.
SolveResult solve_penalized(const CoefficientField& a, const ProblemParams& params,
                            const GridField& init, const SolverOptions& options = {});

struct ContinuationResult {
  std::vector<double> schedule;
  std::vector<SolveResult> solutions;
  std::vector<double> sup_norm_track;   // interior ‖u_ε‖∞
  std::vector<double> grad_sup_track;   // interior ‖∇u_ε‖∞
  std::vector<double> drift;            // ‖u_{ε_k} − u_{ε_{k+1}}‖∞
  double interior_margin = 0.0;
  int failed_index = -1;                // first non-converged step, −1 if none

  bool ok() const { return failed_index < 0; }
};

/// Interior sup norms of u and of its centred-difference gradient over nodes
/// at distance ≥ margin from ∂Ω.
std::pair<double, double> interior_norms(const GridField& u, double margin);

/// Solves at ε_k = eps0·factor^k, k < steps, warm-starting each step from the
/// previous one. The first step starts from `init`; without it the default
/// bump's ray maximiser is used. Stops at the first failed solve.
ContinuationResult continuation_solve(const CoefficientField& a, const ProblemParams& params,
                                      double eps0, double factor, int steps,
                                      const GridField* init = nullptr,
                                      const SolverOptions& options = {});

}  // namespace pobs
