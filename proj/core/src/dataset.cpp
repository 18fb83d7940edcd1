#include "psvm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "psvm/error.hpp"
#include "psvm/format.hpp"

namespace psvm {

void TrainingSet::check_dim(const Sample& x) {
  if (x.empty()) throw InvalidArgument("sample has no features");
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidArgument("sample has a non-finite feature");
  }
  if (m() == 0) {
    dim_ = x.size();
  } else if (x.size() != dim_) {
    throw InvalidArgument("sample dimension " + std::to_string(x.size()) +
                          " does not match training set dimension " + std::to_string(dim_));
  }
}

void TrainingSet::add_hard(Sample x, int y) {
  if (y != -1 && y != 1) throw InvalidArgument("hard label must be -1 or +1");
  check_dim(x);
  hard_.push_back({std::move(x), y});
}

void TrainingSet::add_soft(Sample x, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("soft label must lie in [0, 1]");
  check_dim(x);
  soft_.push_back({std::move(x), p});
}

void TrainingSet::add(Sample x, const Label& label) {
  if (const auto* h = std::get_if<HardLabel>(&label)) {
    add_hard(std::move(x), h->y);
  } else {
    add_soft(std::move(x), std::get<SoftLabel>(label).p);
  }
}

const Sample& TrainingSet::x(std::size_t i) const {
  return i < hard_.size() ? hard_[i].x : soft_.at(i - hard_.size()).x;
}

std::vector<int> TrainingSet::hard_labels() const {
  std::vector<int> y;
  y.reserve(hard_.size());
  for (const auto& h : hard_) y.push_back(h.y);
  return y;
}

void GaussianSpec::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw InvalidArgument("gaussian variance must be positive");
  }
  if (mean_neg.empty() || mean_neg.size() != mean_pos.size()) {
    throw InvalidArgument("class means must be non-empty and of equal dimension");
  }
  if (!(prior_pos > 0.0 && prior_pos < 1.0)) {
    throw InvalidArgument("positive-class prior must lie in (0, 1)");
  }
}

double true_posterior(std::span<const double> x, const GaussianSpec& spec) {
  if (x.size() != spec.mean_pos.size()) throw InvalidArgument("dimension mismatch");
  double d_pos = 0.0;
  double d_neg = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    d_pos += (x[k] - spec.mean_pos[k]) * (x[k] - spec.mean_pos[k]);
    d_neg += (x[k] - spec.mean_neg[k]) * (x[k] - spec.mean_neg[k]);
  }
  // log-odds of class +1; normalizing constants cancel for a shared variance
  const double score = (d_neg - d_pos) / (2.0 * spec.variance) +
                       std::log(spec.prior_pos / (1.0 - spec.prior_pos));
  if (score >= 0.0) return 1.0 / (1.0 + std::exp(-score));
  const double e = std::exp(score);
  return e / (1.0 + e);
}

std::vector<GeneratedPoint> gen_gaussian(const GaussianSpec& spec, std::size_t count,
                                         std::uint64_t seed) {
  spec.validate();
  if (count == 0) throw InvalidArgument("gen_gaussian: count must be at least 1");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(spec.prior_pos);
  std::normal_distribution<double> normal(0.0, std::sqrt(spec.variance));

  std::vector<GeneratedPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int cls = coin(rng) ? 1 : -1;
    const Sample& mean = cls > 0 ? spec.mean_pos : spec.mean_neg;
    Sample x(mean.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = mean[k] + normal(rng);
    const double post = true_posterior(x, spec);
    out.push_back({std::move(x), post, cls});
  }
  return out;
}

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("probability must lie in [0, 1]");
}

}  // namespace

HardLabel label_hard(double p) {
  check_probability(p);
  return HardLabel{p > 0.5 ? 1 : -1};
}

Label label_semi(double p, double eta) {
  check_probability(p);
  if (!(eta > 0.0 && eta < 0.5)) throw InvalidArgument("label_semi: eta must lie in (0, 0.5)");
  if (p > 1.0 - eta) return HardLabel{1};
  if (p < eta) return HardLabel{-1};
  return SoftLabel{p};
}

double add_uniform_noise(double p, double amplitude, std::uint64_t seed) {
  const double one[] = {p};
  return add_uniform_noise(one, amplitude, seed).front();
}

std::vector<double> add_uniform_noise(std::span<const double> p, double amplitude,
                                      std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("noise amplitude must be non-negative");
  std::vector<double> out(p.begin(), p.end());
  for (double v : out) check_probability(v);
  if (amplitude == 0.0) return out;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> delta(-amplitude, amplitude);
  for (double& v : out) v = std::clamp(v + delta(rng), 0.0, 1.0);
  return out;
}

TrainingSet make_hard_set(std::span<const GeneratedPoint> points, std::span<const double> probs) {
  if (points.size() != probs.size()) throw InvalidArgument("points/probabilities size mismatch");
  TrainingSet set;
  for (std::size_t i = 0; i < points.size(); ++i) set.add_hard(points[i].x, label_hard(probs[i]).y);
  return set;
}

TrainingSet make_semi_set(std::span<const GeneratedPoint> points, std::span<const double> probs,
                          double eta) {
  if (points.size() != probs.size()) throw InvalidArgument("points/probabilities size mismatch");
  TrainingSet set;
  for (std::size_t i = 0; i < points.size(); ++i) set.add(points[i].x, label_semi(probs[i], eta));
  return set;
}

// ---------------------------------------------------------------------------

bool Dataset::has_posteriors() const {
  return !rows.empty() &&
         std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.posterior.has_value(); });
}

TrainingSet Dataset::to_training_set() const {
  TrainingSet set;
  for (const auto& r : rows) set.add(r.x, r.label);
  return set;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  const std::size_t d = data.dim();
  for (std::size_t k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
  out << "label_kind,label_value,true_posterior\n";
  for (const auto& r : data.rows) {
    if (r.x.size() != d) throw InvalidArgument("dataset rows have inconsistent dimension");
    for (double v : r.x) out << format_double(v) << ',';
    if (const auto* h = std::get_if<HardLabel>(&r.label)) {
      out << "hard," << h->y << ',';
    } else {
      out << "soft," << format_double(std::get<SoftLabel>(r.label).p) << ',';
    }
    if (r.posterior) out << format_double(*r.posterior);
    out << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  if (first < last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
  }
  return v;
}

}  // namespace

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[header.size() - 3] != "label_kind" ||
      header[header.size() - 2] != "label_value" || header.back() != "true_posterior") {
    throw DataError(path.string() + ": header must be x1,...,xd,label_kind,label_value,true_posterior");
  }
  const std::size_t d = header.size() - 3;

  Dataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != d + 3) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(d + 3) +
                      " fields");
    }
    DatasetRow row;
    row.x.reserve(d);
    for (std::size_t k = 0; k < d; ++k) row.x.push_back(parse_double(fields[k], line_no));
    const std::string& kind = fields[d];
    const double value = parse_double(fields[d + 1], line_no);
    if (kind == "hard") {
      if (value != 1.0 && value != -1.0) {
        throw DataError("line " + std::to_string(line_no) + ": hard label must be -1 or 1");
      }
      row.label = HardLabel{value > 0 ? 1 : -1};
    } else if (kind == "soft") {
      if (!(value >= 0.0 && value <= 1.0)) {
        throw DataError("line " + std::to_string(line_no) + ": soft label must lie in [0, 1]");
      }
      row.label = SoftLabel{value};
    } else {
      throw DataError("line " + std::to_string(line_no) + ": unknown label kind '" + kind + "'");
    }
    if (!fields[d + 2].empty()) row.posterior = parse_double(fields[d + 2], line_no);
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace psvm
