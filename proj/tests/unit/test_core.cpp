#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pobs/core.hpp"

using namespace pobs;

TEST(Grid, SpacingFromExtents) {
  const Grid g = build_grid({{0, 1}, {0, 1}}, {64, 64});
  EXPECT_EQ(g.dim(), 2);
  EXPECT_DOUBLE_EQ(g.h(0), 1.0 / 64);
  EXPECT_DOUBLE_EQ(g.h(1), 1.0 / 64);
  EXPECT_EQ(g.node_count(), 65u * 65u);

  const Grid g1 = build_grid({{0, 2}}, {100});
  EXPECT_DOUBLE_EQ(g1.h(0), 0.02);
}

TEST(Grid, RejectsDegenerateInput) {
  EXPECT_THROW(build_grid({{0, 1}, {0, 1}}, {2, 2}), ConfigError);
  EXPECT_THROW(build_grid({{1, 1}}, {8}), ConfigError);
  EXPECT_THROW(build_grid({{0, 1}, {0, 1}}, {8}), ConfigError);
  EXPECT_THROW(build_grid({}, {}), ConfigError);
}

TEST(Grid, CoordinatesHaveNoDrift) {
  const Grid g = build_grid({{-0.3, 0.7}, {0.1, 0.4}}, {97, 13});
  for (int i = 0; i <= 97; ++i) EXPECT_EQ(g.coord(0, i), -0.3 + i * g.h(0));
  const Index idx{57, 9, 0};
  const Point x = g.point(g.flat(idx));
  EXPECT_EQ(x[0], -0.3 + 57 * g.h(0));
  EXPECT_EQ(x[1], 0.1 + 9 * g.h(1));
}

TEST(Grid, FlatMultiRoundTrip) {
  const Grid g = build_grid({{0, 1}, {0, 2}, {0, 3}}, {4, 5, 6});
  for (std::size_t f = 0; f < g.node_count(); ++f) EXPECT_EQ(g.flat(g.multi(f)), f);
  EXPECT_EQ(g.stride(2), 1u);
  EXPECT_EQ(g.stride(1), 7u);
}

TEST(Grid, BoundaryNodes) {
  const Grid g = build_grid({{0, 1}, {0, 1}}, {4, 4});
  std::size_t boundary = 0;
  for (std::size_t f = 0; f < g.node_count(); ++f) boundary += g.is_boundary(f);
  EXPECT_EQ(boundary, 16u);
}

TEST(ProblemParams, ExponentWindow) {
  EXPECT_NO_THROW(ProblemParams(2, 4, 1, 1, 2, 0.01));
  EXPECT_THROW(ProblemParams(2, 2, 1, 1, 2, 0.01), ConfigError);
  EXPECT_THROW(ProblemParams(1.5, 4, 1, 1, 2, 0.01), ConfigError);
  // N = 3, p = 2: p* = 6
  EXPECT_NO_THROW(ProblemParams(2, 5.9, 1, 1, 3, 0.01));
  EXPECT_THROW(ProblemParams(2, 6, 1, 1, 3, 0.01), ConfigError);
  // p ≥ N lifts the upper bound
  EXPECT_NO_THROW(ProblemParams(3, 100, 1, 1, 3, 0.01));
  EXPECT_THROW(ProblemParams(2, 4, 0, 1, 2, 0.01), ConfigError);
  EXPECT_THROW(ProblemParams(2, 4, 1, -1, 2, 0.01), ConfigError);
  EXPECT_THROW(ProblemParams(2, 4, 1, 1, 2, 1.0), ConfigError);
  EXPECT_THROW(ProblemParams(2, 4, 1, 1, 2, 0.0), ConfigError);
  try {
    ProblemParams(3, 3, 1, 1, 2, 0.1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("exponent window"), std::string::npos);
  }
}

TEST(ProblemParams, WindowIsDeterministicOverRandomDraws) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> P(1.5, 5), L(1, 12);
  std::uniform_int_distribution<int> N(1, 3);
  for (int i = 0; i < 2000; ++i) {
    const double p = P(rng), lambda = L(rng);
    const int dim = N(rng);
    const bool admissible = p >= 2 && p < lambda && (dim < 3 || p >= dim || lambda < dim * p / (dim - p));
    bool accepted = true;
    try {
      ProblemParams(p, lambda, 1, 1, dim, 0.1);
    } catch (const ConfigError&) {
      accepted = false;
    }
    EXPECT_EQ(accepted, admissible) << p << " " << lambda << " " << dim;
  }
}

TEST(Coefficient, ConstantBounds) {
  const Grid g = build_grid({{0, 1}, {0, 1}}, {16, 16});
  const CoefficientField a = eval_coefficient(CoefficientSpec{"constant", 1.0, 0, 1}, g);
  EXPECT_DOUBLE_EQ(a.a0, 1.0);
  EXPECT_DOUBLE_EQ(a.a1, 1.0);
}

TEST(Coefficient, MinimumOverNodes) {
  const Grid g = build_grid({{0, 1}, {0, 1}}, {64, 64});
  // 2 + 0.5 sin(πx) ≥ 2 on [0,1]: minimum 2 at x ∈ {0, 1}
  const auto plus = eval_coefficient([](const Point& x) { return 2 + 0.5 * std::sin(M_PI * x[0]); }, g);
  double brute = 1e300;
  for (std::size_t i = 0; i < g.node_count(); ++i) brute = std::min(brute, 2 + 0.5 * std::sin(M_PI * g.point(i)[0]));
  EXPECT_DOUBLE_EQ(plus.a0, brute);
  EXPECT_NEAR(plus.a0, 2.0, 1e-15);
  const auto minus = eval_coefficient([](const Point& x) { return 2 - 0.5 * std::sin(M_PI * x[0]); }, g);
  EXPECT_NEAR(minus.a0, 1.5, 1e-15);
}

TEST(Coefficient, A1BoundsDerivatives) {
  const Grid g = build_grid({{-5, 5}, {-5, 5}}, {128, 128});
  const auto a = eval_coefficient(CoefficientSpec{"sin_product", 1.0, 0.2, 0.5}, g);
  EXPECT_NEAR(a.a0, 0.8, 1e-3);
  // sup|a| = 1.2, sup|∇a| = 0.1, sup|D²a| ≤ 0.05·√2
  EXPECT_NEAR(a.a1, 1.2, 1e-3);
  EXPECT_LE(a.a1, 1.2 + 1e-12);
}

TEST(Coefficient, RejectsNonPositive) {
  const Grid g = build_grid({{0, 1}, {0, 1}}, {8, 8});
  EXPECT_THROW(eval_coefficient(CoefficientSpec{"constant", -1.0, 0, 1}, g), CoefficientError);
  EXPECT_THROW(eval_coefficient([](const Point& x) { return x[0] - 0.5; }, g), CoefficientError);
  EXPECT_THROW(eval_coefficient(CoefficientSpec{"bogus", 1, 0, 1}, g), ConfigError);
}

TEST(Field, InterpolationIsExactForMultilinear) {
  const Grid g = build_grid({{0, 1}, {-1, 1}}, {8, 10});
  auto f = [](const Point& x) { return 1 + 2 * x[0] - 3 * x[1] + 0.5 * x[0] * x[1]; };
  const GridField u = sample(g, f);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> X(0, 1), Y(-1, 1);
  for (int i = 0; i < 200; ++i) {
    const Point x{X(rng), Y(rng), 0};
    EXPECT_NEAR(interpolate(u, x), f(x), 1e-13);
  }
}

TEST(Field, GradientsAndHessianOfQuadratic) {
  const Grid g = build_grid({{0, 1}, {0, 1}}, {16, 16});
  const GridField u = sample(g, [](const Point& x) { return x[0] * x[0] + 3 * x[0] * x[1]; });
  const auto grad = node_gradients(u);
  const auto hess = hessian_norms(u);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (g.is_boundary(i)) continue;
    const Point x = g.point(i);
    EXPECT_NEAR(grad[i][0], 2 * x[0] + 3 * x[1], 1e-12);
    EXPECT_NEAR(grad[i][1], 3 * x[0], 1e-12);
    EXPECT_NEAR(hess[i], std::sqrt(4.0 + 2 * 9.0), 1e-9);
  }
}

TEST(Field, ShapeChecks) {
  const Grid g = build_grid({{0, 1}}, {8});
  EXPECT_THROW(GridField(g, std::vector<double>(3, 0.0)), ShapeError);
  EXPECT_THROW(require_same_grid(g, build_grid({{0, 1}}, {16}), "x"), ShapeError);
}
