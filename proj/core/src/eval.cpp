#include "psvm/eval.hpp"

#include <algorithm>
#include <cmath>

#include "psvm/error.hpp"

namespace psvm {

namespace {

constexpr double kFloor = 1e-12;

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidArgument("metric inputs have different lengths");
}

double term(double p, double q) {
  if (p <= 0.0) return 0.0;
  return p * (std::log(p) - std::log(std::clamp(q, kFloor, 1.0)));
}

}  // namespace

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  check_sizes(predicted.size(), truth.size());
  if (predicted.empty()) throw InvalidArgument("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

double kl_truncated(std::span<const double> true_p, std::span<const double> pred_p) {
  check_sizes(true_p.size(), pred_p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < true_p.size(); ++i) sum += term(true_p[i], pred_p[i]);
  return sum;
}

double kl_binary(std::span<const double> true_p, std::span<const double> pred_p) {
  check_sizes(true_p.size(), pred_p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < true_p.size(); ++i) {
    sum += term(true_p[i], pred_p[i]) + term(1.0 - true_p[i], 1.0 - pred_p[i]);
  }
  return sum;
}

MetricsReport summarize(std::vector<PointRecord> points, bool with_binary_kl) {
  MetricsReport r;
  r.count = points.size();
  std::vector<int> pred_y, true_y;
  std::vector<double> pred_p, true_p;
  bool all_p = !points.empty();
  for (const auto& pt : points) {
    pred_y.push_back(pt.pred_y);
    true_y.push_back(pt.true_y);
    pred_p.push_back(pt.pred_p);
    if (pt.true_p) {
      true_p.push_back(*pt.true_p);
    } else {
      all_p = false;
    }
  }
  r.accuracy = accuracy(pred_y, true_y);
  if (all_p) {
    r.kl = kl_truncated(true_p, pred_p);
    if (with_binary_kl) r.kl_binary = kl_binary(true_p, pred_p);
  }
  r.per_point = std::move(points);
  return r;
}

}  // namespace psvm
