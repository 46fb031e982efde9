#pragma once

// Empirical checks of the growth, non-degeneracy, barrier, pointwise and
// regularity estimates on computed fields, plus the closed-form constants.

#include <vector>

#include "pobs/core.hpp"
#include "pobs/freeboundary.hpp"
#include "pobs/solver.hpp"

namespace pobs {

/// ((p−1)/p)·(m1 / (2N(a1+1)))^{1/(p−1)}.
double c2_constant(const ProblemParams& params, double a1);

/// min{r1, 1/a1, (m1 / (2 m2 c1^{λ−1}))^{(p−1)/(p(λ−1))}}.
double r2_bound(const ProblemParams& params, double a1, double c1_growth, double r1);

struct GrowthFit {
  Point center{};
  std::vector<double> radii;
  std::vector<double> sup_values;       // sup of u on ∂B_r (interpolated)
  std::vector<double> grad_sup_values;  // sup of |∇u| on ∂B_r
  double slope = 0.0;
  double grad_slope = 0.0;
  double c1_growth = 0.0;  // fitted prefactor of sup u ≈ c·r^slope
};

/// n geometric radii from r_lo to r_hi.
std::vector<double> geometric_radii(double r_lo, double r_hi, int n);

/// Least-squares log-log fits of sup_{∂B_r} u and sup_{∂B_r} |∇u| against r.
/// Radii with a non-positive sup are dropped. Throws FitError when fewer than
/// 4 radii remain or they span less than a factor 2, DomainError when a ball
/// leaves the box.
GrowthFit growth_fit(const GridField& u, const Point& center, const std::vector<double>& radii);

struct NondegeneracyEntry {
  Point point{};
  double radius = 0.0;
  double measured = 0.0;  // max of u over the node shell around ∂B_r
  double margin = 0.0;    // max over the shell of u(z) / (C2 |z−y|^{p/(p−1)})
  bool pass = false;
};

struct NondegeneracyReport {
  double c2_theoretical = 0.0;
  double slack = 0.9;
  std::vector<double> radii;  // admissible radii actually used
  std::vector<NondegeneracyEntry> entries;
  double min_margin = 0.0;
  bool all_pass = false;
};

/// Radii outside [4h, r_max] are discarded (r_max = r2_bound/2 supplied by the
/// caller; ≤ 0 means no upper cap). The shell at radius r is the node set
/// r − h/2 ≤ |z − y| < r + h/2. Throws RangeError when no radius survives or
/// fb is empty, DomainError when a ball leaves the box.
NondegeneracyReport nondegeneracy_check(const GridField& u, const FreeBoundary& fb,
                                        const std::vector<double>& radii,
                                        const ProblemParams& params, double a1, double r_max = 0.0,
                                        double slack = 0.9);

struct BarrierCheck {
  double c2 = 0.0;
  double max_divergence = 0.0;  // over nodes with 2h ≤ |z − y| ≤ r
  double bound = 0.0;           // m1/2
  double slack = 0.0;           // 5h
  std::size_t nodes = 0;
  bool pass = false;
};

/// Discrete divergence of v = C2|x − y|^{p/(p−1)} under the actual
/// coefficient, compared with m1/2 + 5h on B_r(y) \ B_{2h}(y). Throws
/// DomainError when r > 1/a1 or the ball leaves the box.
BarrierCheck barrier_comparison_check(const ProblemParams& params, const CoefficientField& a,
                                      const Point& y, double r);

struct RecursionTrace {
  double C = 0.0, D = 0.0, zeta = 0.0, g0 = 0.0;
  std::vector<double> sequence;  // g_0 … g_{n_max}
  double threshold = 0.0;        // C^{−1/ζ} D^{−1/ζ²}
  bool converged = false;        // g_{n_max} < 1e−12·g0, or g0 = 0
  bool diverged = false;         // some g_n > g0 or non-finite
};

/// Equality case g_{n+1} = C·D^n·g_n^{1+ζ}. Throws ParameterError on C ≤ 0,
/// D ≤ 1, ζ ≤ 0, g0 < 0 or n_max < 0.
RecursionTrace degiorgi_iterate(double C, double D, double zeta, double g0, int n_max);

struct PointwiseReport {
  double c3 = 0.0;  // 2N²a1²(p−1)²
  double worst_ratio = 0.0;
  Point worst_point{};
  std::size_t nodes_checked = 0;
};

double c3_constant(const ProblemParams& params, double a1);

/// max over nodes at least 2 cells from ∂Ω of
///   |m1χ_ε(u) − m2(u⁺)^{λ−1}|² / (C3(|∇u|^{2(p−1)} + (|∇u|^{p−2}|D²u|)²)).
PointwiseReport pointwise_inequality_check(const GridField& u_eps, double a1,
                                           const ProblemParams& params);

struct UniformBounds {
  double interior_margin = 0.0;
  std::vector<double> sup_track;
  std::vector<double> grad_track;
  std::vector<double> combined_track;  // sup + grad per ε
  std::vector<double> global_sup_track;
  double c1 = 0.0;                     // max of combined_track
  double relative_spread = 0.0;        // (max − min)/max of combined_track
};

UniformBounds uniform_bounds_report(const ContinuationResult& cont, double interior_margin);

struct HolderRow {
  double alpha = 0.0;
  double fine = 0.0;
  double coarse = 0.0;
  bool stable = false;  // fine ≤ factor·coarse
};

struct HolderProbe {
  std::vector<HolderRow> rows;
  double stable_alpha = 0.0;  // largest α with every smaller sampled α stable; 0 if none
  double factor = 1.1;
};

/// max |∇u(x) − ∇u(y)| / |x − y|^α over axis-aligned node pairs at offsets
/// 1…max_offset cells inside the window (nodes at distance ≥ window_margin from
/// ∂Ω), compared with the same quantity on the 2× coarsened field. Throws
/// ParameterError on α ∉ (0, 1] and ShapeError when a cell count is odd.
HolderProbe holder_seminorm_probe(const GridField& u, const std::vector<double>& alpha_grid,
                                  double window_margin, double factor = 1.1, int max_offset = 8);

}  // namespace pobs
