#pragma once

// Problem data, uniform Cartesian grids and the scalar fields living on them.

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pobs/errors.hpp"

namespace pobs {

inline constexpr int kMaxDim = 3;

using Index = std::array<int, kMaxDim>;
using Point = std::array<double, kMaxDim>;

/// Scalar data of the penalized p-obstacle problem
///   div(a |∇u|^{p-2} ∇u) = m1 χ_ε(u) − m2 (u⁺)^{λ-1},  u = 0 on ∂Ω.
///
/// The constructor enforces the exponent window 2 ≤ p < λ (< Np/(N−p) when
/// N ≥ 3 and p < N) and the sign constraints on the amplitudes; the default
/// constructor yields the p = 2, λ = 4 benchmark.
struct ProblemParams {
  double p = 2.0;
  double lambda = 4.0;
  double m1 = 1.0;
  double m2 = 1.0;
  int dim = 2;
  double eps = 0.01;
  double delta_reg = 1e-8;
  double tol_res = 1e-8;

  ProblemParams() = default;
  ProblemParams(double p, double lambda, double m1, double m2, int dim, double eps,
                double delta_reg = 1e-8, double tol_res = 1e-8);

  /// Throws ConfigError naming the violated constraint.
  void validate() const;

  ProblemParams with_eps(double new_eps) const;

  /// Growth exponent p/(p−1) of solutions near the free boundary.
  double growth_exponent() const { return p / (p - 1.0); }

  bool operator==(const ProblemParams&) const = default;
};

/// Critical Sobolev exponent Np/(N−p); +inf when it does not constrain λ.
double critical_exponent(int dim, double p);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const Interval&) const = default;
};

/// Axis-aligned box [lo, hi]^N split into `cells` equal cells per axis. Nodes
/// are stored row-major (last axis fastest). Boundary nodes carry the
/// homogeneous Dirichlet data.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<Interval> extents, std::vector<int> cells);

  int dim() const { return dim_; }
  double lo(int axis) const { return extents_[axis].lo; }
  double hi(int axis) const { return extents_[axis].hi; }
  int cells(int axis) const { return cells_[axis]; }
  int nodes(int axis) const { return cells_[axis] + 1; }
  double h(int axis) const { return h_[axis]; }
  double max_h() const;
  double min_h() const;
  const std::vector<Interval>& extents() const { return extents_; }
  std::vector<int> cell_counts() const { return {cells_.begin(), cells_.begin() + dim_}; }

  std::size_t node_count() const { return node_count_; }
  std::size_t stride(int axis) const { return stride_[axis]; }
  double cell_volume() const { return cell_volume_; }

  std::size_t flat(const Index& idx) const;
  Index multi(std::size_t flat) const;

  /// lo + i·h, evaluated directly from the index.
  double coord(int axis, int i) const { return extents_[axis].lo + i * h_[axis]; }
  Point point(std::size_t flat) const;
  bool is_boundary(std::size_t flat) const;

  /// Distance from x to the nearest face of the box (interior margin).
  double distance_to_boundary(const Point& x) const;

  bool operator==(const Grid& other) const;

 private:
  int dim_ = 0;
  std::vector<Interval> extents_;
  std::array<int, kMaxDim> cells_{};
  std::array<double, kMaxDim> h_{};
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t node_count_ = 0;
  double cell_volume_ = 0.0;
};

/// Throws ConfigError on a degenerate interval or fewer than 4 cells on an axis.
Grid build_grid(const std::vector<Interval>& extents, const std::vector<int>& cells);

struct GridField {
  Grid grid;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(Grid g, double fill = 0.0);
  GridField(Grid g, std::vector<double> v);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  double sup_norm() const;
  double min() const;
  double max() const;
  bool all_finite() const;
};

/// Samples f at every node.
GridField sample(const Grid& grid, const std::function<double(const Point&)>& f);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Centred-difference gradient at nodes with a full stencil; one-sided at the
/// box faces.
std::vector<Point> node_gradients(const GridField& u);

/// Frobenius norm of the centred-difference Hessian; zero on nodes without a
/// full stencil.
std::vector<double> hessian_norms(const GridField& u);

/// Multilinear interpolation; points outside the box are clamped to it.
double interpolate(const GridField& u, const Point& x);

/// Closed-form coefficient families understood by the configuration layer.
///   constant:     c0
///   sin_x:        c0 + amp·sin(freq·x₁)
///   sin_product:  c0 + amp·Π_k sin(freq·x_k)
struct CoefficientSpec {
  std::string kind = "constant";
  double c0 = 1.0;
  double amp = 0.0;
  double freq = 1.0;

  std::function<double(const Point&)> function(int dim) const;
  bool operator==(const CoefficientSpec&) const = default;
};

/// a(x) sampled on the grid with its certified bounds: a0 = min over nodes,
/// a1 = max over nodes of |a|, |∇a| and |D²a| from discrete differences.
struct CoefficientField {
  Grid grid;
  std::vector<double> values;
  double a0 = 0.0;
  double a1 = 0.0;

  double operator[](std::size_t i) const { return values[i]; }
};

/// Throws CoefficientError when a node value is not finite and positive.
CoefficientField eval_coefficient(const std::function<double(const Point&)>& a, const Grid& grid);
CoefficientField eval_coefficient(const CoefficientSpec& spec, const Grid& grid);

}  // namespace pobs
