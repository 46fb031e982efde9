#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "pobs/operator.hpp"
#include "pobs/solver.hpp"

using namespace pobs;

namespace {

struct SmallCase {
  Grid grid = build_grid({{-0.5, 0.5}, {-0.5, 0.5}}, {16, 16});
  CoefficientField a = eval_coefficient(CoefficientSpec{}, grid);
  ProblemParams prm{2, 4, 1, 1, 2, 0.01};
};

GridField seed_start(const SmallCase& c) {
  const DescentSeed s = find_descent_seed(c.a, c.prm, default_bump(c.grid));
  GridField u = s.w0;
  for (double& v : u.values) v *= s.t_peak;
  return u;
}

}  // namespace

TEST(Bump, DefaultPlacement) {
  const Grid g = build_grid({{-5, 5}, {0, 2}}, {20, 8});
  const BumpSpec b = default_bump(g);
  EXPECT_DOUBLE_EQ(b.center[0], 0.0);
  EXPECT_DOUBLE_EQ(b.center[1], 1.0);
  EXPECT_DOUBLE_EQ(b.radius, 0.5);
  const GridField w = make_bump(g, b);
  EXPECT_DOUBLE_EQ(w.max(), 1.0);
  EXPECT_GE(w.min(), 0.0);
  EXPECT_THROW(make_bump(g, BumpSpec{{}, 0.0, 1.0}), SeedError);
}

TEST(Seed, RayChangesSignAndPeakIsPositive) {
  const SmallCase c;
  const DescentSeed s = find_descent_seed(c.a, c.prm, default_bump(c.grid));
  EXPECT_NEAR(s.w0.max(), 1.0, 1e-15);
  EXPECT_GT(s.t0, 0.0);
  EXPECT_GT(s.t_peak, 0.0);
  EXPECT_LT(s.t_peak, s.t0);
  EXPECT_GT(s.peak_energy, 0.0);
  EXPECT_LT(ray_profile(s.w0, c.a, c.prm, {s.t0}).front(), 0.0);
}

TEST(Seed, UnitSquareCosineBump) {
  const Grid g = build_grid({{0, 1}, {0, 1}}, {32, 32});
  const auto a = eval_coefficient(CoefficientSpec{}, g);
  const ProblemParams prm(2, 4, 1, 1, 2, 0.01);
  const DescentSeed s = find_descent_seed(a, prm, default_bump(g));
  EXPECT_TRUE(std::isfinite(s.t0));
  EXPECT_LT(ray_profile(s.w0, a, prm, {s.t0}).front(), 0.0);
}

TEST(Seed, NegativeAmplitudeIsRejected) {
  const SmallCase c;
  BumpSpec b = default_bump(c.grid);
  b.amplitude = -1.0;
  EXPECT_THROW(find_descent_seed(c.a, c.prm, b), SeedError);
}

TEST(Seed, SignChangeParameterShrinksWithReaction) {
  const SmallCase c;
  double prev = 1e300;
  for (double m2 : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const ProblemParams prm(2, 4, 1, m2, 2, 0.01);
    const double t0 = find_descent_seed(c.a, prm, default_bump(c.grid)).t0;
    EXPECT_LE(t0, prev) << "m2=" << m2;
    prev = t0;
  }
}

TEST(Solver, ZeroInitialGuessStaysTrivial) {
  const SmallCase c;
  const SolveResult r = solve_penalized(c.a, c.prm, GridField(c.grid));
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.nontrivial);
  EXPECT_EQ(r.u.sup_norm(), 0.0);
}

TEST(Solver, AgreesWithIndependentRelaxation) {
  const SmallCase c;
  const SolveResult r = solve_penalized(c.a, c.prm, seed_start(c));
  ASSERT_TRUE(r.converged);
  ASSERT_TRUE(r.nontrivial);
  EXPECT_LE(r.residual_norm, 1e-8);
  EXPECT_LE(residual_norm(r.u, c.a, c.prm), 1e-8);
  EXPECT_LE(energy_gradient(r.u, c.a, c.prm).sup_norm(), c.prm.tol_res * c.grid.cell_volume());
  const auto ref = oracle::petviashvili(r.u, c.prm.eps);
  ASSERT_LE(ref.residual, 1e-10);
  double diff = 0.0;
  for (std::size_t i = 0; i < r.u.size(); ++i) diff = std::max(diff, std::abs(r.u[i] - ref.u[i]));
  EXPECT_LE(diff, 1e-6);
}

TEST(Solver, RelaxationFromSeedReachesSameSolution) {
  const SmallCase c;
  const SolveResult r = solve_penalized(c.a, c.prm, seed_start(c));
  ASSERT_TRUE(r.converged);
  const auto ref = oracle::petviashvili(seed_start(c), c.prm.eps);
  ASSERT_LE(ref.residual, 1e-10);
  double diff = 0.0;
  for (std::size_t i = 0; i < r.u.size(); ++i) diff = std::max(diff, std::abs(r.u[i] - ref.u[i]));
  EXPECT_LE(diff, 1e-6);
}

TEST(Solver, ConvergesForP3OnBenchmarkDomain) {
  const Grid g = build_grid({{-5, 5}, {-5, 5}}, {64, 64});
  const auto a = eval_coefficient(CoefficientSpec{"sin_product", 1, 0.2, 0.5}, g);
  const ProblemParams prm(3, 4, 1, 1, 2, 0.05);
  const DescentSeed s = find_descent_seed(a, prm, default_bump(g));
  GridField init = s.w0;
  for (double& v : init.values) v *= s.t_peak;
  const SolveResult r = solve_penalized(a, prm, init);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.nontrivial);
  EXPECT_LE(r.residual_norm, prm.tol_res);
  EXPECT_GE(r.u.min(), 0.0);
}

TEST(Solver, RejectsNonFiniteStart) {
  const SmallCase c;
  GridField u = seed_start(c);
  u[c.grid.flat({8, 8, 0})] = NAN;
  EXPECT_THROW(solve_penalized(c.a, c.prm, u), NumericError);
  EXPECT_THROW(solve_penalized(c.a, c.prm, GridField(build_grid({{0, 1}, {0, 1}}, {8, 8}))), ShapeError);
}

TEST(Continuation, SingleStepEqualsSingleSolve) {
  const SmallCase c;
  const GridField init = seed_start(c);
  const ContinuationResult cr = continuation_solve(c.a, c.prm, 0.01, 0.5, 1, &init);
  ASSERT_EQ(cr.solutions.size(), 1u);
  const SolveResult r = solve_penalized(c.a, c.prm.with_eps(0.01), init);
  EXPECT_EQ(cr.solutions[0].u.values, r.u.values);
  EXPECT_TRUE(cr.drift.empty());
}

TEST(Continuation, ScheduleAndTracks) {
  const SmallCase c;
  const ContinuationResult cr = continuation_solve(c.a, c.prm, 0.1, 0.5, 4);
  ASSERT_TRUE(cr.ok());
  ASSERT_EQ(cr.schedule.size(), 4u);
  EXPECT_DOUBLE_EQ(cr.schedule[3], 0.0125);
  EXPECT_EQ(cr.sup_norm_track.size(), 4u);
  EXPECT_EQ(cr.drift.size(), 3u);
  for (const auto& s : cr.solutions) EXPECT_TRUE(s.nontrivial);
}

TEST(Continuation, RejectsBadSchedule) {
  const SmallCase c;
  EXPECT_THROW(continuation_solve(c.a, c.prm, 0.1, 0.5, 0), ConfigError);
  EXPECT_THROW(continuation_solve(c.a, c.prm, 0.1, 1.5, 3), ConfigError);
  EXPECT_THROW(continuation_solve(c.a, c.prm, 0.0, 0.5, 3), ConfigError);
}
