#pragma once

// Discrete free boundary of {u > τ} and the geometric estimators run on it.

#include <cstdint>
#include <vector>

#include "pobs/core.hpp"

namespace pobs {

struct PositivityMask {
  Grid grid;
  std::vector<std::uint8_t> inside;  // 1 where u > tau_pos
  double tau_pos = 0.0;

  bool operator[](std::size_t i) const { return inside[i] != 0; }
  std::size_t count() const;
};

/// τ = h^{p/(p−1)} with h the largest spacing.
double default_tau_pos(const Grid& grid, double p);

/// Throws ParameterError on a negative or non-finite threshold.
PositivityMask positivity_set(const GridField& u, double tau_pos);

/// Υ⁺ as the inner boundary layer: interior nodes inside the mask with at
/// least one interior face neighbour outside it. Points are node coordinates.
struct FreeBoundary {
  Grid grid;
  std::vector<std::size_t> nodes;
  std::vector<Point> points;

  std::size_t size() const { return nodes.size(); }
  bool empty() const { return nodes.empty(); }
};

FreeBoundary extract_free_boundary(const PositivityMask& mask);

/// Wraps an arbitrary node set (synthetic geometries in tests and tools).
FreeBoundary free_boundary_from_nodes(const Grid& grid, std::vector<std::size_t> nodes);

/// Exact Euclidean distance from every node to the nearest node of `targets`
/// (separable lower-envelope transform, physical units). +inf when empty.
std::vector<double> distance_transform(const Grid& grid, const std::vector<std::size_t>& targets);

struct PorosityRow {
  double radius = 0.0;
  double min_delta = 0.0;
  double mean_delta = 0.0;
  Point worst_point{};
  std::size_t samples = 0;
};

/// For each free-boundary point x and radius r:
///   δ(x, r) = max over nodes z ∈ B_r(x) of min(dist(z, Υ⁺), r − |z − x|) / r,
/// the relative radius of the largest node-centred ball inside B_r(x) that
/// misses Υ⁺. Reports the minimum over all points. Throws DomainError when a
/// ball leaves the box and RangeError when fb is empty.
std::vector<PorosityRow> porosity_estimate(const FreeBoundary& fb, const PositivityMask& mask,
                                           const std::vector<double>& radii);

struct BoxCountResult {
  std::vector<double> scales;
  std::vector<std::size_t> counts;       // box-cover counts
  std::vector<std::size_t> mesh_counts;  // occupied cells of the fixed s-mesh
  std::vector<double> proxies;           // counts·s^{N−1}
  double dimension = 0.0;                // −slope of log count vs log s
};

/// Box-cover count per scale: along each axis the points of every s-wide
/// column of the remaining axes are covered greedily by half-open intervals of
/// length s; the count is the minimum over the choice of axis. Throws
/// FitError with fewer than 3 scales, RangeError on scales below the grid
/// spacing and on an empty boundary.
BoxCountResult box_count_measure(const FreeBoundary& fb, const std::vector<double>& scales);

struct SmallGradientSet {
  double sigma = 0.0;
  double threshold = 0.0;  // σ^{1/(p−1)}
  std::vector<std::uint8_t> inside;
};

/// Nodes with centred-difference |∇u| ≤ σ^{1/(p−1)}. Throws ParameterError
/// unless 0 < σ < 1.
SmallGradientSet small_gradient_set(const GridField& u, double p, double sigma);

/// Midpoint rule in s ∈ (0, 1] with s_samples nodes of the cell-counted
/// measure |O_σ ∩ B_{rs}(center) ∩ {u > τ}|. τ < 0 selects default_tau_pos.
/// Throws DomainError when B_r(center) leaves the box.
double gradient_smallness_measure(const GridField& u, double p, double sigma, const Point& center,
                                  double r, int s_samples = 32, double tau_pos = -1.0);

}  // namespace pobs
