#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace psvm {

using Sample = std::vector<double>;

struct HardLabel {
  int y = 1;  // -1 or +1
  bool operator==(const HardLabel&) const = default;
};

struct SoftLabel {
  double p = 0.5;  // posterior P(Y=1 | x)
  bool operator==(const SoftLabel&) const = default;
};

using Label = std::variant<HardLabel, SoftLabel>;

struct HardPoint {
  Sample x;
  int y = 1;
};

struct SoftPoint {
  Sample x;
  double p = 0.5;
};

/// Mixed-supervision training data. Hard points are indexed first
/// (0..n-1), soft points after them (n..m-1); every sample has the same
/// dimension.
class TrainingSet {
 public:
  TrainingSet() = default;

  void add_hard(Sample x, int y);
  void add_soft(Sample x, double p);
  void add(Sample x, const Label& label);

  const std::vector<HardPoint>& hard() const { return hard_; }
  const std::vector<SoftPoint>& soft() const { return soft_; }

  std::size_t n() const { return hard_.size(); }
  std::size_t m() const { return hard_.size() + soft_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return m() == 0; }

  /// Sample at global index i (hard block first).
  const Sample& x(std::size_t i) const;

  std::vector<int> hard_labels() const;

 private:
  void check_dim(const Sample& x);

  std::vector<HardPoint> hard_;
  std::vector<SoftPoint> soft_;
  std::size_t dim_ = 0;
};

/// Two isotropic Gaussians with a shared variance.
struct GaussianSpec {
  Sample mean_neg;
  Sample mean_pos;
  double variance = 1.0;
  double prior_pos = 0.5;

  void validate() const;
};

struct GeneratedPoint {
  Sample x;
  double posterior = 0.5;
  int drawn_class = 1;
};

std::vector<GeneratedPoint> gen_gaussian(const GaussianSpec& spec, std::size_t count,
                                         std::uint64_t seed);

double true_posterior(std::span<const double> x, const GaussianSpec& spec);

/// Threshold rule: +1 iff p > 0.5.
HardLabel label_hard(double p);

/// Hard label when p is within eta of 0 or 1, otherwise the probability itself.
Label label_semi(double p, double eta);

/// clamp(p + delta, 0, 1) with delta ~ U[-amplitude, amplitude].
double add_uniform_noise(double p, double amplitude, std::uint64_t seed);

/// Vector form: one draw per entry from a single stream seeded by `seed`.
std::vector<double> add_uniform_noise(std::span<const double> p, double amplitude,
                                      std::uint64_t seed);

TrainingSet make_hard_set(std::span<const GeneratedPoint> points, std::span<const double> probs);
TrainingSet make_semi_set(std::span<const GeneratedPoint> points, std::span<const double> probs,
                          double eta);

// ---------------------------------------------------------------------------
// CSV dataset files: x1,...,xd,label_kind,label_value,true_posterior

struct DatasetRow {
  Sample x;
  Label label;
  std::optional<double> posterior;
};

struct Dataset {
  std::vector<DatasetRow> rows;

  std::size_t dim() const { return rows.empty() ? 0 : rows.front().x.size(); }
  bool has_posteriors() const;
  TrainingSet to_training_set() const;
};

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace psvm
