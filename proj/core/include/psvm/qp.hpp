#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "psvm/kernel.hpp"

namespace psvm {

struct SolverConfig {
  double kkt_tolerance = 1e-5;
  std::int64_t max_iterations = 10'000'000;  // SMO pair updates
  std::int64_t reference_step_budget = 500'000;
};

struct QPSolution {
  std::vector<double> gamma;  // [alpha; mu_plus; mu_minus]
  double objective = 0.0;
  double kkt_residual = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
};

/// Called with the current iterate after every accepted update.
using IterateObserver = std::function<void(std::span<const double>)>;

/// Working-set solver: maximal-violating-pair selection, closed-form pair
/// step clipped to the box. Starts from gamma = 0. Running out of
/// iterations is not an error; the result carries converged = false.
QPSolution solve_smo(const DualProblem& problem, const SolverConfig& cfg,
                     const IterateObserver& observer = {});

/// Slow oracle: accelerated projected gradient with exact projection onto
/// the feasible set. Meant for a few dozen variables.
QPSolution solve_reference(const DualProblem& problem, const SolverConfig& cfg);

/// Maximal-violating-pair gap of gamma, floored at 0.
double kkt_residual(const DualProblem& problem, std::span<const double> gamma);

/// 1/2 g'Gg - e'g
double dual_objective(const DualProblem& problem, std::span<const double> gamma);

/// Euclidean projection onto {0 <= x <= upper, f'x = 0}.
std::vector<double> project_feasible(std::span<const double> f, std::span<const double> upper,
                                     std::span<const double> point);

}  // namespace psvm
