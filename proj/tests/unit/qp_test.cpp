#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "psvm/error.hpp"
#include "psvm/qp.hpp"
#include "test_support.hpp"

namespace psvm {
namespace {

DualProblem two_point_problem(double C = 100.0) {
  TrainingSet s;
  s.add_hard({-1.0}, -1);
  s.add_hard({1.0}, 1);
  return assemble(build_blocks(s, LinearKernel{}), {}, C, C, s.hard_labels());
}

DualProblem random_problem(std::mt19937_64& rng, std::size_t max_hard = 8, std::size_t max_soft = 6) {
  std::uniform_real_distribution<double> cdist(0.1, 10.0);
  std::uniform_real_distribution<double> edist(0.02, 0.45);
  const TrainingSet s = testing::random_training_set(rng, {max_hard, max_soft, 2, true});
  const auto cfg = PrecisionConfig::from_eta(edist(rng));
  std::vector<TargetBand> bands;
  for (const auto& sp : s.soft()) bands.push_back(band(sp.p, cfg));
  const KernelSpec k = (rng() & 1) ? KernelSpec{LinearKernel{}} : KernelSpec{RbfKernel{0.8}};
  const double C = cdist(rng);
  return assemble(build_blocks(s, k), bands, C, cdist(rng), s.hard_labels());
}

void expect_feasible(const DualProblem& p, std::span<const double> g, double tol) {
  ASSERT_EQ(g.size(), p.size());
  for (std::size_t t = 0; t < g.size(); ++t) {
    EXPECT_GE(g[t], 0.0);
    EXPECT_LE(g[t], p.upper[t]);
  }
  double scale = 1.0;
  for (double v : g) scale += std::abs(v);
  EXPECT_LE(std::abs(dot(p.f, g)), tol * scale);
}

TEST(Smo, TwoPointProblem) {
  const auto p = two_point_problem();
  const auto sol = solve_smo(p, {});
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.gamma[0], 0.5, 1e-9);
  EXPECT_NEAR(sol.gamma[1], 0.5, 1e-9);
  EXPECT_NEAR(sol.objective, -0.5, 1e-12);
}

TEST(Smo, NonPositiveLinearTermGivesZero) {
  // two soft points, both bands clamped on the side that would pay off
  TrainingSet s;
  s.add_soft({0.0}, 0.5);
  s.add_soft({1.0}, 0.5);
  auto p = assemble(build_blocks(s, LinearKernel{}), std::vector<TargetBand>(2, band(0.5, PrecisionConfig::from_eta(0.1))),
                    1.0, 1.0, std::span<const int>{});
  // replace e with a non-positive vector
  for (double& e : p.e_tilde) e = -std::abs(e) - 0.1;
  const auto sol = solve_smo(p, {});
  EXPECT_TRUE(sol.converged);
  for (double g : sol.gamma) EXPECT_EQ(g, 0.0);
  EXPECT_EQ(sol.objective, 0.0);
}

TEST(Smo, SingleSoftPointStaysAtZero) {
  TrainingSet s;
  s.add_soft({0.3}, 0.5);
  const TargetBand b[] = {band(0.5, PrecisionConfig::from_eta(0.1))};
  const auto p = assemble(build_blocks(s, RbfKernel{1.0}), b, 1.0, 1.0, std::span<const int>{});
  const auto sol = solve_smo(p, {});
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.gamma, std::vector<double>(2, 0.0));
}

TEST(KktResidual, Examples) {
  const auto p = two_point_problem();
  const std::vector<double> zero(2, 0.0);
  EXPECT_DOUBLE_EQ(kkt_residual(p, zero), 2.0);
  const std::vector<double> opt{0.5, 0.5};
  EXPECT_NEAR(kkt_residual(p, opt), 0.0, 1e-15);
}

TEST(KktResidual, NoFeasiblePairIsZero) {
  // both variables at the upper bound with f = (-1, +1): no direction keeps f'x = 0
  const auto p = two_point_problem(0.2);
  const std::vector<double> at_bound{0.2, 0.2};
  EXPECT_EQ(kkt_residual(p, at_bound), 0.0);
}

TEST(DualObjective, HandComputed) {
  const auto p = two_point_problem();
  const std::vector<double> g{0.25, 0.25};
  // 1/2 (0.5)^2 - 0.5
  EXPECT_DOUBLE_EQ(dual_objective(p, g), -0.375);
}

TEST(ProjectFeasible, FixedPointsAndContract) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<double> f(n), upper(n), x(n);
    for (std::size_t t = 0; t < n; ++t) {
      f[t] = (rng() & 1) ? 1.0 : -1.0;
      upper[t] = 0.5 + std::abs(u(rng));
      x[t] = u(rng);
    }
    const auto px = project_feasible(f, upper, x);
    for (std::size_t t = 0; t < n; ++t) {
      ASSERT_GE(px[t], 0.0);
      ASSERT_LE(px[t], upper[t]);
    }
    ASSERT_NEAR(dot(f, px), 0.0, 1e-9);
    // idempotent
    const auto ppx = project_feasible(f, upper, px);
    for (std::size_t t = 0; t < n; ++t) ASSERT_NEAR(ppx[t], px[t], 1e-12);
    // optimality of the projection: (x - px)'(z - px) <= 0 for feasible z
    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; ++t) z[t] = u(rng);
    const auto pz = project_feasible(f, upper, z);
    double inner = 0.0;
    for (std::size_t t = 0; t < n; ++t) inner += (x[t] - px[t]) * (pz[t] - px[t]);
    EXPECT_LE(inner, 1e-9);
  }
}

TEST(ProjectFeasible, ExampleWithOppositeSigns) {
  const std::vector<double> f{1.0, -1.0}, upper{1.0, 1.0}, x{1.0, 0.0};
  const auto p = project_feasible(f, upper, x);
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[1], 0.5, 1e-12);
}

TEST(Smo, MonotoneDescentAndFeasibilityAlongThePath) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_problem(rng);
    double last = 0.0;
    bool ok = true;
    std::size_t calls = 0;
    const auto sol = solve_smo(p, {}, [&](std::span<const double> g) {
      ++calls;
      const double obj = dual_objective(p, g);
      if (obj > last + 1e-12 * (1 + std::abs(last))) ok = false;
      last = obj;
      double drift = std::abs(dot(p.f, g));
      for (std::size_t t = 0; t < g.size(); ++t) {
        if (g[t] < 0.0 || g[t] > p.upper[t]) ok = false;
      }
      if (drift > 1e-8) ok = false;
    });
    EXPECT_TRUE(ok) << "trial " << trial;
    EXPECT_TRUE(sol.converged);
    EXPECT_EQ(static_cast<std::int64_t>(calls), sol.iterations);
  }
}

TEST(Smo, MatchesReferenceSolverOnRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_problem(rng);
    const auto smo = solve_smo(p, {});
    const auto ref = solve_reference(p, {});
    ASSERT_TRUE(smo.converged) << "trial " << trial;
    expect_feasible(p, smo.gamma, 1e-10);
    expect_feasible(p, ref.gamma, 1e-8);
    EXPECT_LE(smo.kkt_residual, 1e-5);
    const double scale = 1.0 + std::abs(ref.objective);
    EXPECT_NEAR(smo.objective, ref.objective, 1e-6 * scale) << "trial " << trial;
    EXPECT_DOUBLE_EQ(smo.objective, dual_objective(p, smo.gamma));
  }
}

TEST(Smo, IterationCapReportsNonConvergence) {
  std::mt19937_64 rng(77);
  const auto p = random_problem(rng, 20, 20);
  SolverConfig cfg;
  cfg.max_iterations = 1;
  const auto sol = solve_smo(p, cfg);
  EXPECT_FALSE(sol.converged);
  EXPECT_LE(sol.iterations, 1);
  EXPECT_GT(sol.kkt_residual, cfg.kkt_tolerance);
  expect_feasible(p, sol.gamma, 1e-10);
}

TEST(Smo, RejectsMalformedProblem) {
  auto p = two_point_problem();
  p.f[0] = 0.5;
  EXPECT_THROW(solve_smo(p, {}), InvalidArgument);
  auto q = two_point_problem();
  q.upper.pop_back();
  EXPECT_THROW(solve_smo(q, {}), InvalidArgument);
  auto r = two_point_problem();
  r.G(0, 1) = 7.0;  // asymmetric
  EXPECT_THROW(solve_smo(r, {}), InvalidArgument);
}

}  // namespace
}  // namespace psvm
