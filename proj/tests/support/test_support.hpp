#pragma once

// Random instance generators and independent oracles shared by the test
// binaries. Nothing here calls into the code path it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "psvm/bounds.hpp"
#include "psvm/dataset.hpp"
#include "psvm/kernel.hpp"
#include "psvm/matrix.hpp"

namespace psvm::testing {

struct RandomInstanceSpec {
  std::size_t max_hard = 8;
  std::size_t max_soft = 6;
  std::size_t dim = 2;
  bool allow_empty_hard = true;
};

/// Mixed training set with labels loosely tied to the first feature so both
/// classes and a spread of soft probabilities appear.
inline TrainingSet random_training_set(std::mt19937_64& rng, const RandomInstanceSpec& spec = {}) {
  std::uniform_int_distribution<std::size_t> n_hard_dist(spec.allow_empty_hard ? 0 : 1, spec.max_hard);
  std::uniform_int_distribution<std::size_t> n_soft_dist(0, spec.max_soft);
  std::normal_distribution<double> feat(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::size_t n_hard = n_hard_dist(rng);
  std::size_t n_soft = n_soft_dist(rng);
  if (n_hard + n_soft == 0) n_hard = 1;
  if (n_hard == 0) n_soft = std::max<std::size_t>(n_soft, 1);

  TrainingSet set;
  for (std::size_t i = 0; i < n_hard; ++i) {
    Sample x(spec.dim);
    for (double& v : x) v = feat(rng);
    const int y = (x[0] + 0.7 * feat(rng)) > 0 ? 1 : -1;
    set.add_hard(std::move(x), y);
  }
  for (std::size_t i = 0; i < n_soft; ++i) {
    Sample x(spec.dim);
    for (double& v : x) v = feat(rng);
    set.add_soft(std::move(x), unit(rng));
  }
  return set;
}

/// Smallest eigenvalue of a symmetric matrix, via Eigen.
inline double min_eigenvalue(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline double frobenius(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

/// Platt NLL written from the textbook definition, without the overflow
/// guards of the production code.
inline double platt_nll_oracle(double A, double B, const std::vector<double>& s, const std::vector<int>& y) {
  double n_pos = 0, n_neg = 0;
  for (int v : y) (v > 0 ? n_pos : n_neg) += 1;
  const double t_pos = (n_pos + 1) / (n_pos + 2);
  const double t_neg = 1 / (n_neg + 2);
  double f = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(A * s[i] + B));
    const double t = y[i] > 0 ? t_pos : t_neg;
    const double pc = std::clamp(p, 1e-300, 1.0);
    const double qc = std::clamp(1.0 - p, 1e-300, 1.0);
    f -= t * std::log(pc) + (1 - t) * std::log(qc);
  }
  return f;
}

struct GridMin {
  double A = 0, B = 0, nll = 0;
};

/// Coarse-to-fine grid search over A in [-50, 0], B in [-10, 10], refined
/// until the step is 1e-3.
inline GridMin platt_grid_search(const std::vector<double>& s, const std::vector<int>& y) {
  double a_lo = -50, a_hi = 0, b_lo = -10, b_hi = 10;
  double step_a = 0.5, step_b = 0.2;
  GridMin best{0, 0, platt_nll_oracle(0, 0, s, y)};
  while (true) {
    for (double A = a_lo; A <= a_hi + 1e-12; A += step_a) {
      for (double B = b_lo; B <= b_hi + 1e-12; B += step_b) {
        const double f = platt_nll_oracle(A, B, s, y);
        if (f < best.nll) best = {A, B, f};
      }
    }
    if (step_a <= 1e-3 && step_b <= 1e-3) break;
    a_lo = std::max(-50.0, best.A - 5 * step_a);
    a_hi = std::min(0.0, best.A + 5 * step_a);
    b_lo = std::max(-10.0, best.B - 5 * step_b);
    b_hi = std::min(10.0, best.B + 5 * step_b);
    step_a = std::max(step_a / 5, 1e-3);
    step_b = std::max(step_b / 5, 1e-3);
  }
  return best;
}

}  // namespace psvm::testing
