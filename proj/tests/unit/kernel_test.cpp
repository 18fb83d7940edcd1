#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "psvm/error.hpp"
#include "psvm/kernel.hpp"
#include "test_support.hpp"

namespace psvm {
namespace {

TEST(EvalKernel, Examples) {
  const Sample u{0.3, -1.2};
  EXPECT_EQ(eval_kernel(RbfKernel{0.7}, u, u), 1.0);
  const double a[] = {0.0}, b[] = {2.0};
  EXPECT_NEAR(eval_kernel(RbfKernel{1.0}, a, b), 0.135335283236612691894, 1e-16);
  const double c[] = {1, 2}, d[] = {3, 4};
  EXPECT_EQ(eval_kernel(LinearKernel{}, c, d), 11.0);
}

TEST(EvalKernel, DimensionMismatchAndBadSigma) {
  const double a[] = {0.0}, b[] = {1.0, 2.0};
  EXPECT_THROW(eval_kernel(LinearKernel{}, a, b), InvalidArgument);
  TrainingSet s;
  s.add_hard({1.0}, 1);
  EXPECT_THROW(build_blocks(s, RbfKernel{0.0}), InvalidArgument);
  EXPECT_THROW(build_blocks(TrainingSet{}, LinearKernel{}), InvalidArgument);
}

TrainingSet one_hard_one_soft() {
  TrainingSet s;
  s.add_hard({1.0}, 1);
  s.add_soft({2.0}, 0.5);
  return s;
}

TEST(BuildBlocks, HandComputedLinear) {
  const auto b = build_blocks(one_hard_one_soft(), LinearKernel{});
  EXPECT_EQ(b.k1(0, 0), 1.0);
  EXPECT_EQ(b.k2(0, 0), 2.0);
  EXPECT_EQ(b.k3(0, 0), 4.0);
}

TEST(BuildBlocks, HardOnlyIsClassicalGram) {
  TrainingSet s;
  s.add_hard({1.0, 0.0}, 1);
  s.add_hard({0.0, 2.0}, -1);
  s.add_hard({1.0, 1.0}, -1);
  const auto b = build_blocks(s, LinearKernel{});
  EXPECT_EQ(b.k2.cols(), 0u);
  EXPECT_EQ(b.k3.rows(), 0u);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(b.k1(i, j), s.hard()[i].y * s.hard()[j].y * dot(s.hard()[i].x, s.hard()[j].x));
    }
  }
}

TEST(BuildBlocks, FlippingALabelFlipsRowAndColumn) {
  std::mt19937_64 rng(4);
  TrainingSet s = testing::random_training_set(rng, {6, 4, 2, false});
  TrainingSet flipped;
  for (std::size_t i = 0; i < s.n(); ++i) flipped.add_hard(s.hard()[i].x, i == 0 ? -s.hard()[i].y : s.hard()[i].y);
  for (const auto& sp : s.soft()) flipped.add_soft(sp.x, sp.p);
  const auto a = build_blocks(s, RbfKernel{1.0});
  const auto b = build_blocks(flipped, RbfKernel{1.0});
  for (std::size_t j = 0; j < s.n(); ++j) {
    const double sign = j == 0 ? 1.0 : -1.0;
    EXPECT_EQ(b.k1(0, j), sign * a.k1(0, j));
    EXPECT_EQ(b.k1(j, 0), sign * a.k1(j, 0));
  }
  for (std::size_t j = 0; j < s.soft().size(); ++j) EXPECT_EQ(b.k2(0, j), -a.k2(0, j));
}

TEST(Assemble, HandComputedRankOneG) {
  const auto set = one_hard_one_soft();
  const auto cfg = PrecisionConfig::from_eta(0.1);
  const TargetBand bands[] = {band(0.5, cfg)};
  const int y[] = {1};
  const auto p = assemble(build_blocks(set, LinearKernel{}), bands, 100, 100, y);
  const double expected[3][3] = {{1, -2, 2}, {-2, 4, -4}, {2, -4, 4}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(p.G(i, j), expected[i][j]);
  }
  EXPECT_EQ(p.f, (std::vector<double>{1, -1, 1}));
  EXPECT_EQ(p.e_tilde, (std::vector<double>{1, -bands[0].z_plus, bands[0].z_minus}));
  EXPECT_EQ(p.upper, (std::vector<double>{100, 100, 100}));
  EXPECT_NO_THROW(p.validate());
}

TEST(Assemble, HardOnlyCollapsesToClassicalDual) {
  std::mt19937_64 rng(8);
  TrainingSet s = testing::random_training_set(rng, {8, 0, 3, false});
  const auto blocks = build_blocks(s, RbfKernel{0.8});
  const auto y = s.hard_labels();
  const auto p = assemble(blocks, {}, 3.0, 5.0, y);
  EXPECT_EQ(p.G, blocks.k1);
  EXPECT_EQ(p.e_tilde, std::vector<double>(s.n(), 1.0));
  EXPECT_EQ(p.f, std::vector<double>(y.begin(), y.end()));
  EXPECT_EQ(p.upper, std::vector<double>(s.n(), 3.0));
}

TEST(Assemble, ClampedBandDropsConstraint) {
  TrainingSet s;
  s.add_soft({0.0}, 0.95);
  s.add_soft({1.0}, 0.02);
  const auto cfg = PrecisionConfig::from_eta(0.1);
  const TargetBand bands[] = {band(0.95, cfg), band(0.02, cfg)};
  const auto p = assemble(build_blocks(s, LinearKernel{}), bands, 1, 2, std::span<const int>{});
  // layout [mu_plus(2); mu_minus(2)]
  EXPECT_EQ(p.upper, (std::vector<double>{0, 2, 2, 0}));
  EXPECT_EQ(p.active, (std::vector<bool>{false, true, true, false}));
  EXPECT_NO_THROW(p.validate());
}

TEST(Assemble, RejectsBadArguments) {
  const auto set = one_hard_one_soft();
  const auto blocks = build_blocks(set, LinearKernel{});
  const TargetBand bands[] = {band(0.5, PrecisionConfig::from_eta(0.1))};
  const int y[] = {1};
  EXPECT_THROW(assemble(blocks, bands, 0.0, 1.0, y), InvalidArgument);
  EXPECT_THROW(assemble(blocks, bands, 1.0, -1.0, y), InvalidArgument);
  EXPECT_THROW(assemble(blocks, {}, 1.0, 1.0, y), InvalidArgument);
  const int bad_y[] = {0};
  EXPECT_THROW(assemble(blocks, bands, 1.0, 1.0, bad_y), InvalidArgument);
}

std::vector<TargetBand> bands_for(const TrainingSet& s, double eta) {
  std::vector<TargetBand> out;
  for (const auto& sp : s.soft()) out.push_back(band(sp.p, PrecisionConfig::from_eta(eta)));
  return out;
}

TEST(GProperties, SymmetricPsdOnRandomInstances) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const TrainingSet s = testing::random_training_set(rng);
    const KernelSpec k = trial % 2 ? KernelSpec{LinearKernel{}} : KernelSpec{RbfKernel{0.9}};
    const auto p = assemble(build_blocks(s, k), bands_for(s, 0.1), 1.0, 1.0, s.hard_labels());
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) ASSERT_EQ(p.G(i, j), p.G(j, i));
    }
    EXPECT_GE(testing::min_eigenvalue(p.G), -1e-8 * testing::frobenius(p.G));
  }
}

TEST(GProperties, QuadraticFormEqualsExplicitWeightNorm) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const TrainingSet s = testing::random_training_set(rng, {8, 6, 3, true});
    const auto p = assemble(build_blocks(s, LinearKernel{}), bands_for(s, 0.1), 3.0, 3.0, s.hard_labels());
    std::vector<double> gamma(p.size());
    for (double& g : gamma) g = u(rng);

    // w = sum alpha_i y_i x_i - sum (mu+_j - mu-_j) x_j
    Sample w(s.dim(), 0.0);
    const std::size_t n = s.n(), m_soft = s.soft().size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < w.size(); ++k) w[k] += gamma[i] * s.hard()[i].y * s.hard()[i].x[k];
    }
    for (std::size_t j = 0; j < m_soft; ++j) {
      for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] -= (gamma[n + j] - gamma[n + m_soft + j]) * s.soft()[j].x[k];
      }
    }
    const double explicit_norm = dot(w, w);
    const double quad = dot(gamma, multiply(p.G, gamma));
    EXPECT_NEAR(quad, explicit_norm, 1e-10 * (1 + explicit_norm));
  }
}

TEST(GProperties, RbfGramEntriesInUnitInterval) {
  std::mt19937_64 rng(23);
  const TrainingSet s = testing::random_training_set(rng, {0, 20, 2, true});
  const auto b = build_blocks(s, RbfKernel{0.5});
  for (std::size_t i = 0; i < b.k3.rows(); ++i) {
    EXPECT_EQ(b.k3(i, i), 1.0);
    for (std::size_t j = 0; j < b.k3.cols(); ++j) {
      EXPECT_GT(b.k3(i, j), 0.0);
      EXPECT_LE(b.k3(i, j), 1.0);
    }
  }
}

TEST(DualProblem, PointOfMapsVariablesToPoints) {
  DualProblem p;
  p.n_hard = 2;
  p.n_soft = 3;
  EXPECT_EQ(p.point_of(1), 1u);
  EXPECT_EQ(p.point_of(2), 2u);  // first mu_plus
  EXPECT_EQ(p.point_of(4), 4u);
  EXPECT_EQ(p.point_of(5), 2u);  // first mu_minus
  EXPECT_EQ(p.point_of(7), 4u);
}

}  // namespace
}  // namespace psvm
