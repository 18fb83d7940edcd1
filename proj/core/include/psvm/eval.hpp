#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psvm {

/// Fraction of positions where predicted and truth agree.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// sum_i p_i ln(p_i / q_i) over the positive-class probabilities only.
/// Predictions are floored at 1e-12; terms with p_i = 0 contribute 0. This is
/// not a proper divergence: individual terms (and the sum) can be negative.
double kl_truncated(std::span<const double> true_p, std::span<const double> pred_p);

/// Full binary KL: adds the (1 - p) ln((1 - p)/(1 - q)) terms. Diagnostics only.
double kl_binary(std::span<const double> true_p, std::span<const double> pred_p);

struct PointRecord {
  std::optional<double> true_p;
  double pred_p = 0.5;
  int true_y = 1;
  int pred_y = 1;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::optional<double> kl;
  std::optional<double> kl_binary;
  std::size_t count = 0;
  std::vector<PointRecord> per_point;
};

/// Builds a report from per-point records; KL fields are set only when every
/// record carries a true probability.
MetricsReport summarize(std::vector<PointRecord> points, bool with_binary_kl = false);

}  // namespace psvm
