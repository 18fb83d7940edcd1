#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psvm/dataset.hpp"
#include "psvm/eval.hpp"
#include "psvm/model.hpp"

namespace psvm {

enum class ExperimentKind { repro1d, repro2d, noise_sweep };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::repro1d;
  std::size_t n_learn = 200;
  std::size_t n_test = 1000;
  double eta = 0.1;
  double C = 100.0;
  double C_tilde = 100.0;
  double sigma = 0.5;
  std::vector<double> noise_amplitudes{0.0};
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;
  // 0: fit Platt on the C-SVM training scores; k >= 2: k-fold out-of-fold scores
  std::size_t platt_folds = 0;
  SolverConfig solver;
  // worker cap; 0 means PSVM_THREADS or the hardware concurrency
  std::size_t threads = 0;

  /// Defaults for each experiment: 1D means +-0.5 with variance 0.3, 2D means
  /// +-(0.3, 0.5) with variance 0.7 and noise 0.1, sweep amplitudes 0..0.5 in
  /// steps of 0.05 with 30 repetitions; the two single-setting experiments run
  /// 10 repetitions.
  static ExperimentConfig defaults(ExperimentKind kind);

  GaussianSpec gaussian() const;
  TrainConfig train_config() const;
  void validate() const;
};

struct MethodScores {
  double accuracy = 0.0;
  double kl = 0.0;
  bool converged = true;
};

struct CurveRow {
  Sample x;
  double true_p = 0.5;
  double psvm_p = 0.5;
  int psvm_y = 1;
  double csvm_p = 0.5;
  int csvm_y = 1;
};

struct TrialResult {
  std::size_t amplitude_index = 0;
  double amplitude = 0.0;
  std::size_t repetition = 0;
  std::uint64_t data_seed = 0;
  MethodScores psvm;
  MethodScores csvm;
  std::vector<CurveRow> curve;  // filled for repetition 0 only
};

struct CellSummary {
  double amplitude = 0.0;
  std::string method;
  double acc_mean = 0.0;
  double acc_std = 0.0;
  double kl_mean = 0.0;
  double kl_std = 0.0;
  double acc_median = 0.0;
  double kl_median = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialResult> trials;     // ordered by (amplitude, repetition)
  std::vector<CellSummary> summary;    // per amplitude: psvm row then csvm row
};

/// Generated data for one trial: training points with (noisy) probabilities
/// and a clean test set whose truth is the Bayes label.
struct TrialData {
  std::vector<GeneratedPoint> train;
  std::vector<double> train_probs;
  std::vector<GeneratedPoint> test;
};

TrialData make_trial_data(const ExperimentConfig& cfg, double amplitude, std::size_t amplitude_index,
                          std::size_t repetition);

/// C-SVM plus a Platt map fitted on its training scores (platt_folds < 2) or
/// on k-fold out-of-fold scores.
PsvmModel train_csvm_with_platt(const TrainingSet& hard_set, const TrainConfig& cfg,
                                std::size_t platt_folds = 0);

/// Per-point test predictions; C-SVM probabilities go through the model's Platt map.
MetricsReport evaluate(const PsvmModel& model, std::span<const GeneratedPoint> test);

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t amplitude_index, std::size_t repetition);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::vector<CellSummary> summarize_trials(const ExperimentConfig& cfg,
                                          const std::vector<TrialResult>& trials);

/// Worker count: cap (if non-zero), else PSVM_THREADS, else hardware concurrency.
std::size_t worker_count(std::size_t cap = 0);

}  // namespace psvm
