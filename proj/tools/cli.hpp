#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psvm/experiment.hpp"

namespace psvm::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kConvergenceFailure = 3,
};

/// Union of every command's settings. Unset optionals fall back to the
/// per-experiment or per-dimension defaults.
struct Options {
  std::string method = "psvm";
  std::string experiment = "repro1d";
  std::string kernel = "rbf";
  std::optional<double> eta;
  std::optional<double> C;
  std::optional<double> C_tilde;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
  std::vector<double> noise_amplitudes;
  std::optional<std::size_t> repetitions;
  std::optional<std::size_t> n_learn;
  std::optional<std::size_t> n_test;
  std::size_t platt_folds = 0;
  std::size_t threads = 0;
  double kkt_tolerance = 1e-5;
  std::int64_t max_iterations = 10'000'000;
  bool strict = false;
  bool binary_kl = false;
  std::filesystem::path out;

  // positionals
  std::filesystem::path dataset;
  std::filesystem::path model;
};

/// Parses argv-style arguments (without the program name) and dispatches.
/// Returns one of the ExitCode values.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

ExperimentConfig experiment_config(const Options& opt);

int cmd_gen(const Options& opt, std::ostream& log);
int cmd_train(const Options& opt, std::ostream& log);
int cmd_predict(const Options& opt, std::ostream& log);
int cmd_eval(const Options& opt, std::ostream& log);
int cmd_experiment(const Options& opt, std::ostream& log);

// File writers shared by the commands.
std::string metrics_to_json(const MetricsReport& report, const std::string& method,
                            std::optional<std::uint64_t> seed, const std::string& config_echo);
void write_curves_csv(const std::filesystem::path& path, const std::vector<Sample>& xs,
                      const MetricsReport& report);
void write_summary_csv(const std::filesystem::path& path, const std::vector<CellSummary>& rows);
void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialResult>& trials);

}  // namespace psvm::cli
