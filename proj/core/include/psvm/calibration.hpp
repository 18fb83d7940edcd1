#pragma once

#include <cstddef>
#include <span>

namespace psvm {

/// P(y = 1 | s) = 1 / (1 + exp(A s + B))
struct PlattParams {
  double A = 0.0;
  double B = 0.0;
};

/// Smoothed regression targets for the two classes.
struct PlattTargets {
  double pos = 0.0;  // (N+ + 1) / (N+ + 2)
  double neg = 0.0;  // 1 / (N- + 2)
};

PlattTargets platt_targets(std::size_t n_pos, std::size_t n_neg);

/// Fits (A, B) to decision scores by Newton's method with backtracking on the
/// negative log-likelihood against smoothed targets (N+ + 1)/(N+ + 2) and
/// 1/(N- + 2). Throws InvalidArgument unless both classes are present.
PlattParams fit_platt(std::span<const double> scores, std::span<const int> labels,
                      int max_newton_steps = 100);

double apply_platt(const PlattParams& params, double score);

/// Objective minimized by fit_platt.
double platt_nll(const PlattParams& params, std::span<const double> scores,
                 std::span<const int> labels);

}  // namespace psvm
