#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "pobs/freeboundary.hpp"

using namespace pobs;

namespace {

Grid unit_grid(int n) { return build_grid({{0, 1}, {0, 1}}, {n, n}); }

GridField disk_field(const Grid& g, double cx, double cy, double R) {
  return sample(g, [=](const Point& x) {
    return std::max(0.0, R * R - (x[0] - cx) * (x[0] - cx) - (x[1] - cy) * (x[1] - cy));
  });
}

std::vector<std::size_t> vertical_line(const Grid& g, int column, int j_lo, int j_hi) {
  std::vector<std::size_t> out;
  for (int j = j_lo; j <= j_hi; ++j) out.push_back(g.flat({column, j, 0}));
  return out;
}

}  // namespace

TEST(Positivity, ZeroFieldIsEmpty) {
  const Grid g = unit_grid(16);
  for (double tau : {0.0, 1e-12, 0.5}) EXPECT_EQ(positivity_set(GridField(g), tau).count(), 0u);
  EXPECT_THROW(positivity_set(GridField(g), -1.0), ParameterError);
}

TEST(Positivity, HalfPlaneUpToOneCell) {
  const Grid g = unit_grid(64);
  const GridField u = sample(g, [](const Point& x) { return std::pow(std::max(x[0] - 0.5, 0.0), 2); });
  const PositivityMask m = positivity_set(u, 1e-12);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double x = g.point(i)[0];
    if (x > 0.5 + g.h(0)) EXPECT_TRUE(m[i]);
    if (x <= 0.5) EXPECT_FALSE(m[i]);
  }
  EXPECT_DOUBLE_EQ(default_tau_pos(g, 2), std::pow(1.0 / 64, 2));
  EXPECT_DOUBLE_EQ(default_tau_pos(g, 3), std::pow(1.0 / 64, 1.5));
}

TEST(FreeBoundary, EmptyAndFullMasks) {
  const Grid g = unit_grid(16);
  EXPECT_TRUE(extract_free_boundary(positivity_set(GridField(g), 0.0)).empty());
  GridField u(g);
  for (std::size_t i = 0; i < g.node_count(); ++i) u[i] = g.is_boundary(i) ? 0.0 : 1.0;
  EXPECT_TRUE(extract_free_boundary(positivity_set(u, 0.0)).empty());
}

TEST(FreeBoundary, DiskMatchesPerimeter) {
  const Grid g = unit_grid(128);
  const FreeBoundary fb = extract_free_boundary(positivity_set(disk_field(g, 0.5, 0.5, 0.25), 0.0));
  const double perimeter_cells = 2 * M_PI * 0.25 * 128;
  EXPECT_NEAR(static_cast<double>(fb.size()), perimeter_cells, 0.15 * perimeter_cells);
  for (std::size_t j = 0; j < fb.size(); ++j) {
    EXPECT_EQ(fb.points[j], g.point(fb.nodes[j]));
    const double r = std::hypot(fb.points[j][0] - 0.5, fb.points[j][1] - 0.5);
    EXPECT_LT(r, 0.25);
    EXPECT_GT(r, 0.25 - 1.5 * g.h(0));
  }
}

TEST(FreeBoundary, CommutesWithAxisSwap) {
  std::mt19937_64 rng(41);
  const int n = 24;
  const Grid g = unit_grid(n);
  const GridField u = oracle::random_field(g, rng, -1, 1);
  GridField ut(g);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) ut[g.flat({j, i, 0})] = u[g.flat({i, j, 0})];
  const FreeBoundary a = extract_free_boundary(positivity_set(u, 0.0));
  const FreeBoundary b = extract_free_boundary(positivity_set(ut, 0.0));
  std::vector<std::size_t> swapped;
  for (std::size_t f : a.nodes) {
    const Index idx = g.multi(f);
    swapped.push_back(g.flat({idx[1], idx[0], 0}));
  }
  std::sort(swapped.begin(), swapped.end());
  std::vector<std::size_t> got = b.nodes;
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, swapped);
}

TEST(DistanceTransform, MatchesBruteForce) {
  std::mt19937_64 rng(42);
  const Grid g = build_grid({{0, 1.3}, {-0.2, 0.5}}, {26, 19});
  std::uniform_int_distribution<std::size_t> N(0, g.node_count() - 1);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<std::size_t> targets;
    for (int k = 0; k < 1 + 3 * trial; ++k) targets.push_back(N(rng));
    const auto dt = distance_transform(g, targets);
    const auto ref = oracle::brute_distance(g, targets);
    for (std::size_t i = 0; i < g.node_count(); ++i) EXPECT_NEAR(dt[i], ref[i], 1e-12);
  }
  const auto none = distance_transform(g, {});
  EXPECT_TRUE(std::isinf(none[0]));
}

TEST(DistanceTransform, TriangleInequality) {
  std::mt19937_64 rng(43);
  const Grid g = unit_grid(40);
  std::uniform_int_distribution<std::size_t> N(0, g.node_count() - 1);
  std::vector<std::size_t> targets;
  for (int k = 0; k < 12; ++k) targets.push_back(N(rng));
  const auto dt = distance_transform(g, targets);
  int violations = 0;
  for (int k = 0; k < 20000; ++k) {
    const std::size_t x = N(rng), y = N(rng);
    const Point px = g.point(x), py = g.point(y);
    if (dt[x] > dt[y] + std::hypot(px[0] - py[0], px[1] - py[1]) + 1e-12) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(Porosity, FlatBoundaryGivesHalf) {
  const Grid g = unit_grid(128);
  const double h = g.h(0);
  const FreeBoundary fb = free_boundary_from_nodes(g, vertical_line(g, 64, 40, 88));
  const PositivityMask mask = positivity_set(sample(g, [](const Point& x) { return x[0] - 0.5; }), 0.0);
  const std::vector<double> radii{8 * h, 16 * h, 32 * h};
  const auto rows = porosity_estimate(fb, mask, radii);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_NEAR(row.min_delta, 0.5, 2 * h / row.radius) << "r=" << row.radius;
    EXPECT_EQ(row.samples, fb.size());
    EXPECT_GE(row.mean_delta, row.min_delta);
  }
}

TEST(Porosity, SinglePointGivesHalfUnderContainment) {
  const Grid g = unit_grid(128);
  const double h = g.h(0);
  const FreeBoundary fb = free_boundary_from_nodes(g, {g.flat({64, 64, 0})});
  const PositivityMask mask = positivity_set(GridField(g), 0.0);
  for (const auto& row : porosity_estimate(fb, mask, {8 * h, 16 * h, 32 * h}))
    EXPECT_NEAR(row.min_delta, 0.5, 2 * h / row.radius);
}

TEST(Porosity, Errors) {
  const Grid g = unit_grid(32);
  const PositivityMask mask = positivity_set(GridField(g), 0.0);
  EXPECT_THROW(porosity_estimate(free_boundary_from_nodes(g, {}), mask, {0.1}), RangeError);
  const FreeBoundary fb = free_boundary_from_nodes(g, {g.flat({4, 16, 0})});
  EXPECT_THROW(porosity_estimate(fb, mask, {0.2}), DomainError);
}

TEST(BoxCount, UnitSegment) {
  const Grid g = build_grid({{-0.25, 1.25}, {-0.25, 1.25}}, {192, 192});
  std::vector<std::size_t> nodes;
  for (int i = 32; i < 160; ++i) nodes.push_back(g.flat({i, 96, 0}));  // x ∈ [0, 1)
  const FreeBoundary fb = free_boundary_from_nodes(g, nodes);
  const auto res = box_count_measure(fb, {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
  EXPECT_NEAR(res.dimension, 1.0, 0.1);
  for (double proxy : res.proxies) EXPECT_NEAR(proxy, 1.0, 0.15);
}

TEST(BoxCount, CircleProxy) {
  const Grid g = unit_grid(256);
  const FreeBoundary fb = extract_free_boundary(positivity_set(disk_field(g, 0.5, 0.5, 0.25), 0.0));
  const auto res = box_count_measure(fb, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
  const double length = 2 * M_PI * 0.25;
  for (double proxy : res.proxies) EXPECT_NEAR(proxy, length, 0.15 * length);
  EXPECT_NEAR(res.dimension, 1.0, 0.15);
  for (std::size_t k = 0; k < res.counts.size(); ++k) EXPECT_LE(res.counts[k], res.mesh_counts[k]);
}

TEST(BoxCount, SinglePointAndErrors) {
  const Grid g = unit_grid(64);
  const FreeBoundary fb = free_boundary_from_nodes(g, {g.flat({20, 30, 0})});
  EXPECT_LE(box_count_measure(fb, {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32}).dimension, 0.1);
  EXPECT_THROW(box_count_measure(fb, {1.0 / 4, 1.0 / 8}), FitError);
  EXPECT_THROW(box_count_measure(fb, {1.0 / 4, 1.0 / 8, 1.0 / 128}), RangeError);
  EXPECT_THROW(box_count_measure(free_boundary_from_nodes(g, {}), {0.25, 0.125, 0.0625}), RangeError);
}

TEST(GradientSmallness, ConstantSlopeHalfPlane) {
  const Grid g = build_grid({{-1, 1}, {-1, 1}}, {256, 256});
  const double h = g.h(0), r = 0.5, g0 = 0.2;
  const GridField u = sample(g, [=](const Point& x) { return g0 * std::max(x[0], 0.0); });
  const Point c{0, 0, 0};
  // O_σ misses the positivity set when σ^{1/(p−1)} < g0
  EXPECT_EQ(gradient_smallness_measure(u, 2, 0.1, c, r), 0.0);
  // otherwise ∫₀¹ |B_{rs} ∩ {x > 0}| ds = πr²/6
  const double exact = M_PI * r * r / 6;
  const double layer = (M_PI + 2) * r * h / 2;
  EXPECT_NEAR(gradient_smallness_measure(u, 2, 0.5, c, r), exact, layer);
  EXPECT_NEAR(gradient_smallness_measure(u, 2, 0.5, c, r, 256), exact, layer);
}

TEST(GradientSmallness, MonotoneInSigmaAndRadius) {
  const Grid g = unit_grid(64);
  const GridField u = sample(g, [](const Point& x) {
    return std::max(0.0, std::sin(3 * x[0]) * std::cos(2 * x[1]) - 0.2) * (1 + x[0] * x[1]);
  });
  const Point c{0.5, 0.5, 0};
  double prev = 0.0;
  for (double sigma : {0.01, 0.05, 0.1, 0.2, 0.4, 0.8, 0.99}) {
    const double v = gradient_smallness_measure(u, 2.5, sigma, c, 0.3);
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = 0.0;
  for (double r : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    const double v = gradient_smallness_measure(u, 2.5, 0.3, c, r);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_THROW(gradient_smallness_measure(u, 2, 0.0, c, 0.1), ParameterError);
  EXPECT_THROW(gradient_smallness_measure(u, 2, 1.0, c, 0.1), ParameterError);
  EXPECT_THROW(gradient_smallness_measure(u, 2, 0.5, c, 0.6), DomainError);
}
