#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "pobs/operator.hpp"

using namespace pobs;

namespace {

CoefficientField unit_coefficient(const Grid& g) { return eval_coefficient(CoefficientSpec{}, g); }

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Max error of the discrete divergence against the exact value over the annulus.
double radial_error(int n, double p) {
  const Grid g = build_grid({{-0.5, 0.5}, {-0.5, 0.5}}, {n, n});
  const double C = 1.0, beta = p / (p - 1);
  const GridField u = sample(g, [&](const Point& x) { return C * std::pow(std::hypot(x[0], x[1]), beta); });
  const GridField d = apply_divergence_form(u, unit_coefficient(g), p, 0.0);
  const double exact = barrier_operator_value(C, p, 2);
  double err = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Point x = g.point(i);
    const double r = std::hypot(x[0], x[1]);
    if (r >= 0.2 && r <= 0.4) err = std::max(err, std::abs(d[i] - exact));
  }
  return err;
}

}  // namespace

TEST(Flux, Examples) {
  const Point g{3, 4, 0};
  const Point f2 = p_flux(g, 2, 0);
  EXPECT_EQ(f2[0], 3);
  EXPECT_EQ(f2[1], 4);
  const Point f3 = p_flux(g, 3, 0);
  EXPECT_NEAR(f3[0], 15, 1e-13);
  EXPECT_NEAR(f3[1], 20, 1e-13);
  const Point f3b = p_flux(Point{2, 0, 0}, 3, 0);
  EXPECT_NEAR(f3b[0], 4, 1e-15);
  EXPECT_EQ(f3b[1], 0);
  const Point z = p_flux(Point{}, 4, 0);
  EXPECT_EQ(z[0], 0);
  EXPECT_THROW(p_flux(g, 1.5, 0), ParameterError);
  EXPECT_THROW(p_flux(g, 2, -1), ParameterError);
  EXPECT_THROW(p_flux(Point{NAN, 0, 0}, 2, 0), NumericError);
}

TEST(Flux, MonotonicityBound) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-3, 3), P(2, 6);
  int violations = 0;
  for (int i = 0; i < 100000; ++i) {
    const double p = P(rng);
    const Point xi{U(rng), U(rng), 0}, eta{U(rng), U(rng), 0};
    const Point fx = p_flux(xi, p, 0), fe = p_flux(eta, p, 0);
    const Point dx{xi[0] - eta[0], xi[1] - eta[1], 0};
    const Point df{fx[0] - fe[0], fx[1] - fe[1], 0};
    if (dot(df, dx) < std::pow(2.0, -p) * std::pow(std::sqrt(dot(dx, dx)), p)) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(Operator, QuadraticIsExactAtP2) {
  const Grid g = build_grid({{0, 1}, {0, 1}}, {32, 32});
  const GridField u = sample(g, [](const Point& x) { return x[0] * x[0] + x[1] * x[1]; });
  const GridField d = apply_divergence_form(u, unit_coefficient(g), 2, 0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (g.is_boundary(i))
      EXPECT_EQ(d[i], 0.0);
    else
      EXPECT_NEAR(d[i], 4.0, 1e-12);
  }
}

TEST(Operator, MatchesFivePointStencilAtP2) {
  std::mt19937_64 rng(5);
  const Grid g = build_grid({{-1, 2}, {0, 1}}, {24, 17});
  std::uniform_real_distribution<double> A(0.5, 2.0);
  const CoefficientField a = eval_coefficient([&](const Point&) { return A(rng); }, g);
  for (int trial = 0; trial < 5; ++trial) {
    const GridField u = oracle::random_field(g, rng);
    const GridField d = apply_divergence_form(u, a, 2, 1e-8);
    const auto ref = oracle::five_point(u, a.values);
    for (std::size_t i = 0; i < g.node_count(); ++i)
      EXPECT_NEAR(d[i], ref[i], 1e-10 * (1 + std::abs(ref[i])));
  }
}

TEST(Operator, RadialBarrierAtP2IsRoundingExact) {
  EXPECT_LE(radial_error(64, 2), 1e-9);
  EXPECT_LE(radial_error(128, 2), 1e-9);
}

TEST(Operator, RadialConvergenceOrder) {
  for (double p : {3.0, 4.0}) {
    const double e64 = radial_error(64, p), e128 = radial_error(128, p), e256 = radial_error(256, p);
    EXPECT_GE(std::log2(e64 / e128), 0.9) << "p=" << p;
    EXPECT_GE(std::log2(e128 / e256), 0.9) << "p=" << p;
  }
}

TEST(Operator, EquivariantUnderAxisSwapAndReflection) {
  std::mt19937_64 rng(8);
  const int n = 20;
  const Grid g = build_grid({{0, 1}, {0, 1}}, {n, n});
  std::uniform_real_distribution<double> A(0.5, 2.0);
  const std::vector<double> av = [&] {
    std::vector<double> v(g.node_count());
    for (double& x : v) x = A(rng);
    return v;
  }();
  const GridField u = oracle::random_field(g, rng);
  auto transform = [&](const std::vector<double>& v, int mode) {
    std::vector<double> out(v.size());
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const std::size_t src = g.flat({i, j, 0});
        const std::size_t dst = mode == 0 ? g.flat({j, i, 0}) : g.flat({n - i, j, 0});
        out[dst] = v[src];
      }
    return out;
  };
  for (double p : {2.0, 3.0, 4.5}) {
    const CoefficientField a{g, av, 0.5, 2.0};
    const GridField d = apply_divergence_form(u, a, p, 1e-6);
    for (int mode : {0, 1}) {
      const GridField ut(g, transform(u.values, mode));
      const CoefficientField at{g, transform(av, mode), 0.5, 2.0};
      const GridField dt = apply_divergence_form(ut, at, p, 1e-6);
      const auto expect = transform(d.values, mode);
      for (std::size_t i = 0; i < g.node_count(); ++i)
        EXPECT_NEAR(dt[i], expect[i], 1e-9 * (1 + std::abs(expect[i])));
    }
  }
}

TEST(Operator, ShapeMismatch) {
  const Grid g1 = build_grid({{0, 1}, {0, 1}}, {8, 8});
  const Grid g2 = build_grid({{0, 1}, {0, 1}}, {16, 16});
  EXPECT_THROW(apply_divergence_form(GridField(g1), unit_coefficient(g2), 2, 0), ShapeError);
}

TEST(Residual, ZeroFieldAndSigns) {
  const Grid g = build_grid({{0, 1}, {0, 1}}, {8, 8});
  const auto a = unit_coefficient(g);
  const ProblemParams prm(2, 4, 1, 1, 2, 0.1);
  EXPECT_EQ(residual_norm(GridField(g), a, prm), 0.0);

  // constant 0.5 inside: at a node whose neighbours are also 0.5 the divergence vanishes
  GridField u(g);
  for (std::size_t i = 0; i < g.node_count(); ++i) u[i] = g.is_boundary(i) ? 0.0 : 0.5;
  const GridField r = residual(u, a, prm);
  const std::size_t c = g.flat({4, 4, 0});
  EXPECT_NEAR(r[c], -1.0 + 0.125, 1e-14);
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (g.is_boundary(i)) EXPECT_EQ(r[i], 0.0);
  EXPECT_NEAR(residual_norm(u, a, prm), GridField(g, r.values).sup_norm(), 0);
}

TEST(Residual, QuadraticWithNegligibleReaction) {
  // m2 must be positive; 1e-12 contributes at most 8e-12 on [0,1]²
  const Grid g = build_grid({{0, 1}, {0, 1}}, {32, 32});
  const auto a = unit_coefficient(g);
  const ProblemParams prm(2, 4, 1, 1e-12, 2, 1e-3);
  const GridField u = sample(g, [](const Point& x) { return x[0] * x[0] + x[1] * x[1]; });
  const GridField r = residual(u, a, prm);
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (!g.is_boundary(i) && u[i] >= prm.eps) EXPECT_NEAR(r[i], 3.0, 1e-9);
}

TEST(Barrier, Values) {
  EXPECT_DOUBLE_EQ(barrier_operator_value(1, 2, 2), 4.0);
  EXPECT_DOUBLE_EQ(barrier_operator_value(1, 3, 2), 4.5);
  EXPECT_DOUBLE_EQ(barrier_operator_value(1.0 / 16, 2, 2), 0.25);
  EXPECT_DOUBLE_EQ(barrier_operator_value(0.5, 2, 3), 3.0);
  EXPECT_THROW(barrier_operator_value(0, 2, 2), ParameterError);
  EXPECT_THROW(barrier_operator_value(1, 1, 2), ParameterError);
}
