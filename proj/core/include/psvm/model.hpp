#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psvm/bounds.hpp"
#include "psvm/calibration.hpp"
#include "psvm/dataset.hpp"
#include "psvm/kernel.hpp"
#include "psvm/qp.hpp"

namespace psvm {

struct TrainConfig {
  double C = 100.0;
  double C_tilde = 100.0;
  KernelSpec kernel = RbfKernel{0.5};
  PrecisionConfig precision = PrecisionConfig::from_eta(0.1);
  SolverConfig solver;

  void validate() const;
};

struct SolverDiagnostics {
  bool converged = false;
  double kkt_residual = 0.0;
  double objective = 0.0;
  std::int64_t iterations = 0;
};

/// Kernel expansion decision(x) = sum_i coefficients[i] k(support_points[i], x) + bias.
struct PsvmModel {
  std::vector<Sample> support_points;
  std::vector<double> coefficients;
  double bias = 0.0;
  SigmoidLink link;
  KernelSpec kernel = LinearKernel{};
  std::size_t dim = 0;

  // metadata
  std::string method = "psvm";
  double C = 0.0;
  double C_tilde = 0.0;
  double eta = 0.0;
  std::optional<std::uint64_t> seed;
  std::size_t n_hard = 0;
  std::size_t n_soft = 0;
  SolverDiagnostics diagnostics;
  std::vector<std::string> warnings;

  // Score-to-probability map fitted for C-SVM models; P-SVM models use the link.
  std::optional<PlattParams> platt;
};

/// Everything produced while training, kept for audits and tests.
struct TrainResult {
  PsvmModel model;
  DualProblem problem;
  QPSolution solution;
  std::vector<TargetBand> bands;
  std::vector<double> scores;  // training-point scores without bias
};

TrainResult train_psvm_detailed(const TrainingSet& train, const TrainConfig& cfg);
PsvmModel train_psvm(const TrainingSet& train, const TrainConfig& cfg);

/// Classical SVM: the hard-only special case. Throws if any label is soft.
PsvmModel train_csvm(const TrainingSet& hard_set, const TrainConfig& cfg);

/// Bias from the KKT conditions: mean over free multipliers, or the midpoint
/// of the interval left by bound multipliers when none is free. Throws
/// NumericalInconsistency when that interval is empty by more than the
/// solution's own KKT residual.
double recover_bias(const DualProblem& problem, const QPSolution& solution,
                    std::span<const double> scores_without_b);

double decision(const PsvmModel& model, std::span<const double> x);
int predict_class(const PsvmModel& model, std::span<const double> x);
double predict_prob(const PsvmModel& model, std::span<const double> x);

struct PrimalAudit {
  std::vector<double> xi;
  std::vector<double> xi_minus;
  std::vector<double> xi_plus;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
};

PrimalAudit audit(const TrainingSet& train, const TrainConfig& cfg, const PsvmModel& model,
                  const QPSolution& solution);

void save_model(const std::filesystem::path& path, const PsvmModel& model);
PsvmModel load_model(const std::filesystem::path& path);
std::string model_to_json(const PsvmModel& model);
PsvmModel model_from_json(const std::string& text);

}  // namespace psvm
