#include "psvm/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "psvm/error.hpp"

namespace psvm {

void TrainConfig::validate() const {
  if (!(C > 0.0) || !(C_tilde > 0.0)) throw InvalidArgument("C and C_tilde must be positive");
  psvm::validate(kernel);
  link_param(precision);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Expansion coefficient of each training point: alpha_i y_i for hard points,
// -(mu_plus - mu_minus) for soft points.
std::vector<double> point_coefficients(const DualProblem& p, std::span<const double> gamma) {
  const std::size_t n = p.n_hard;
  const std::size_t s = p.n_soft;
  std::vector<double> theta(n + s);
  for (std::size_t i = 0; i < n; ++i) theta[i] = gamma[i] * p.f[i];
  for (std::size_t j = 0; j < s; ++j) theta[n + j] = -(gamma[n + j] - gamma[n + s + j]);
  return theta;
}

// Scores without bias at every training point, read off G Γ:
// (GΓ)_i = y_i s_i for hard rows, (GΓ)_{mu_minus j} = s_j for soft points.
std::vector<double> training_scores(const DualProblem& p, std::span<const double> gamma) {
  const auto g = multiply(p.G, gamma);
  const std::size_t n = p.n_hard;
  const std::size_t s = p.n_soft;
  std::vector<double> scores(n + s);
  for (std::size_t i = 0; i < n; ++i) scores[i] = p.f[i] * g[i];
  for (std::size_t j = 0; j < s; ++j) scores[n + j] = g[n + s + j];
  return scores;
}

}  // namespace

double recover_bias(const DualProblem& problem, const QPSolution& solution,
                    std::span<const double> scores_without_b) {
  const auto& gamma = solution.gamma;
  if (gamma.size() != problem.size()) throw InvalidArgument("recover_bias: solution size mismatch");
  if (scores_without_b.size() != problem.n_hard + problem.n_soft) {
    throw InvalidArgument("recover_bias: one score per training point expected");
  }

  // Each variable t with gradient g_t = f_t s_t - e_t pins r_t = -f_t g_t:
  // free => b = r_t; otherwise one side of an interval for b.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double b_low = -kInf;
  double b_up = kInf;
  for (std::size_t t = 0; t < problem.size(); ++t) {
    if (!problem.active[t]) continue;
    const double f = problem.f[t];
    const double g = f * scores_without_b[problem.point_of(t)] - problem.e_tilde[t];
    const double r = -f * g;
    const double u = problem.upper[t];
    const double eps = 1e-9 * u;
    const bool at_lower = gamma[t] <= eps;
    const bool at_upper = gamma[t] >= u - eps;
    if (!at_lower && !at_upper) {
      free_sum += r;
      ++free_count;
      continue;
    }
    // "up" variables bound b from below, "low" variables from above
    const bool bounds_below = (at_lower && f > 0) || (at_upper && f < 0);
    if (bounds_below) {
      b_low = std::max(b_low, r);
    } else {
      b_up = std::min(b_up, r);
    }
  }

  if (free_count > 0) return free_sum / static_cast<double>(free_count);

  const double slack = 2.0 * solution.kkt_residual + 1e-9 * (1.0 + std::abs(b_low) + std::abs(b_up));
  if (b_low > b_up + slack && std::isfinite(b_low) && std::isfinite(b_up)) {
    throw NumericalInconsistency("recover_bias: empty bias interval [" + std::to_string(b_low) +
                                 ", " + std::to_string(b_up) + "]");
  }
  if (std::isfinite(b_low) && std::isfinite(b_up)) return 0.5 * (b_low + b_up);
  if (std::isfinite(b_low)) return b_low;
  if (std::isfinite(b_up)) return b_up;
  return 0.0;
}

TrainResult train_psvm_detailed(const TrainingSet& train, const TrainConfig& cfg) {
  if (train.empty()) throw InvalidArgument("train_psvm: empty training set");
  cfg.validate();

  TrainResult res;
  res.bands.reserve(train.soft().size());
  for (const auto& sp : train.soft()) res.bands.push_back(band(sp.p, cfg.precision));
  if (train.n() == 0 &&
      std::none_of(res.bands.begin(), res.bands.end(),
                   [](const TargetBand& b) { return b.lower_active() || b.upper_active(); })) {
    throw InvalidArgument("train_psvm: no hard points and no active soft band");
  }

  const auto y = train.hard_labels();
  res.problem = assemble(build_blocks(train, cfg.kernel), res.bands, cfg.C, cfg.C_tilde, y);
  res.solution = solve_smo(res.problem, cfg.solver);
  res.scores = training_scores(res.problem, res.solution.gamma);

  PsvmModel& model = res.model;
  model.bias = recover_bias(res.problem, res.solution, res.scores);
  model.link = link_param(cfg.precision);
  model.kernel = cfg.kernel;
  model.dim = train.dim();
  model.method = train.soft().empty() ? "csvm" : "psvm";
  model.C = cfg.C;
  model.C_tilde = cfg.C_tilde;
  model.eta = cfg.precision.eta();
  model.n_hard = train.n();
  model.n_soft = train.soft().size();
  model.diagnostics = {res.solution.converged, res.solution.kkt_residual, res.solution.objective,
                       res.solution.iterations};
  if (!res.solution.converged) {
    model.warnings.push_back("solver stopped after " + std::to_string(res.solution.iterations) +
                             " iterations with KKT residual " +
                             std::to_string(res.solution.kkt_residual));
  }

  const auto theta = point_coefficients(res.problem, res.solution.gamma);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double scale = i < train.n() ? cfg.C : cfg.C_tilde;
    if (std::abs(theta[i]) < 1e-10 * scale) continue;
    model.support_points.push_back(train.x(i));
    model.coefficients.push_back(theta[i]);
  }
  return res;
}

PsvmModel train_psvm(const TrainingSet& train, const TrainConfig& cfg) {
  return train_psvm_detailed(train, cfg).model;
}

PsvmModel train_csvm(const TrainingSet& hard_set, const TrainConfig& cfg) {
  if (!hard_set.soft().empty()) throw InvalidArgument("train_csvm: all labels must be hard");
  auto model = train_psvm(hard_set, cfg);
  model.method = "csvm";
  return model;
}

double decision(const PsvmModel& model, std::span<const double> x) {
  if (x.size() != model.dim) {
    throw InvalidArgument("decision: input dimension " + std::to_string(x.size()) +
                          " does not match model dimension " + std::to_string(model.dim));
  }
  double s = model.bias;
  for (std::size_t i = 0; i < model.coefficients.size(); ++i) {
    s += model.coefficients[i] * eval_kernel(model.kernel, model.support_points[i], x);
  }
  return s;
}

int predict_class(const PsvmModel& model, std::span<const double> x) {
  return decision(model, x) >= 0.0 ? 1 : -1;
}

double predict_prob(const PsvmModel& model, std::span<const double> x) {
  return prob_from_score(decision(model, x), model.link);
}

PrimalAudit audit(const TrainingSet& train, const TrainConfig& cfg, const PsvmModel& model,
                  const QPSolution& solution) {
  const std::size_t n = train.n();
  const std::size_t s = train.soft().size();
  if (solution.gamma.size() != n + 2 * s) throw InvalidArgument("audit: solution size mismatch");
  const auto& gamma = solution.gamma;

  // |w|^2 straight from the kernel expansion over all training points
  std::vector<double> theta(n + s);
  for (std::size_t i = 0; i < n; ++i) theta[i] = gamma[i] * train.hard()[i].y;
  for (std::size_t j = 0; j < s; ++j) theta[n + j] = -(gamma[n + j] - gamma[n + s + j]);
  double w2 = 0.0;
  for (std::size_t i = 0; i < n + s; ++i) {
    if (theta[i] == 0.0) continue;
    for (std::size_t j = 0; j < n + s; ++j) {
      if (theta[j] == 0.0) continue;
      w2 += theta[i] * theta[j] * eval_kernel(cfg.kernel, train.x(i), train.x(j));
    }
  }

  PrimalAudit a;
  a.xi.resize(n);
  a.xi_minus.assign(s, 0.0);
  a.xi_plus.assign(s, 0.0);
  double hinge = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& hp = train.hard()[i];
    a.xi[i] = std::max(0.0, 1.0 - hp.y * decision(model, hp.x));
    hinge += a.xi[i];
  }

  double band_loss = 0.0;
  double dual_linear = 0.0;
  for (std::size_t i = 0; i < n; ++i) dual_linear += gamma[i];
  for (std::size_t j = 0; j < s; ++j) {
    const auto& sp = train.soft()[j];
    const TargetBand b = band(sp.p, cfg.precision);
    const double score = decision(model, sp.x);
    if (b.lower_active()) {
      a.xi_minus[j] = std::max(0.0, b.z_minus - score);
      dual_linear += gamma[n + s + j] * b.z_minus;
    }
    if (b.upper_active()) {
      a.xi_plus[j] = std::max(0.0, score - b.z_plus);
      dual_linear -= gamma[n + j] * b.z_plus;
    }
    band_loss += a.xi_minus[j] + a.xi_plus[j];
  }

  a.primal_objective = 0.5 * w2 + cfg.C * hinge + cfg.C_tilde * band_loss;
  a.dual_objective = dual_linear - 0.5 * w2;
  a.gap = a.primal_objective - a.dual_objective;
  return a;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json kernel_to_json(const KernelSpec& k) {
  if (const auto* rbf = std::get_if<RbfKernel>(&k)) return {{"type", "rbf"}, {"sigma", rbf->sigma}};
  return {{"type", "linear"}};
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "linear") return LinearKernel{};
  if (type == "rbf") return RbfKernel{j.at("sigma").get<double>()};
  throw DataError("unknown kernel type '" + type + "'");
}

}  // namespace

std::string model_to_json(const PsvmModel& model) {
  nlohmann::json j;
  j["format"] = "psvm-model/1";
  j["method"] = model.method;
  j["kernel"] = kernel_to_json(model.kernel);
  j["dim"] = model.dim;
  j["support_points"] = model.support_points;
  j["coefficients"] = model.coefficients;
  j["bias"] = model.bias;
  j["link"] = {{"a", model.link.a}};
  if (model.platt) j["platt"] = {{"A", model.platt->A}, {"B", model.platt->B}};
  nlohmann::json train;
  train["C"] = model.C;
  train["C_tilde"] = model.C_tilde;
  train["eta"] = model.eta;
  train["seed"] = model.seed ? nlohmann::json(*model.seed) : nlohmann::json(nullptr);
  train["n_hard"] = model.n_hard;
  train["n_soft"] = model.n_soft;
  j["training"] = train;
  j["diagnostics"] = {{"converged", model.diagnostics.converged},
                      {"kkt_residual", model.diagnostics.kkt_residual},
                      {"objective", model.diagnostics.objective},
                      {"iterations", model.diagnostics.iterations}};
  j["warnings"] = model.warnings;
  return j.dump(2);
}

PsvmModel model_from_json(const std::string& text) {
  PsvmModel m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.method = j.at("method").get<std::string>();
    m.kernel = kernel_from_json(j.at("kernel"));
    m.dim = j.at("dim").get<std::size_t>();
    m.support_points = j.at("support_points").get<std::vector<Sample>>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.link.a = j.at("link").at("a").get<double>();
    if (j.contains("platt")) m.platt = PlattParams{j["platt"].at("A").get<double>(), j["platt"].at("B").get<double>()};
    const auto& t = j.at("training");
    m.C = t.at("C").get<double>();
    m.C_tilde = t.at("C_tilde").get<double>();
    m.eta = t.at("eta").get<double>();
    if (!t.at("seed").is_null()) m.seed = t["seed"].get<std::uint64_t>();
    m.n_hard = t.at("n_hard").get<std::size_t>();
    m.n_soft = t.at("n_soft").get<std::size_t>();
    const auto& d = j.at("diagnostics");
    m.diagnostics = {d.at("converged").get<bool>(), d.at("kkt_residual").get<double>(),
                     d.at("objective").get<double>(), d.at("iterations").get<std::int64_t>()};
    m.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
  if (m.support_points.size() != m.coefficients.size()) {
    throw DataError("model has " + std::to_string(m.support_points.size()) + " support points but " +
                    std::to_string(m.coefficients.size()) + " coefficients");
  }
  for (const auto& sp : m.support_points) {
    if (sp.size() != m.dim) throw DataError("support point dimension does not match model dimension");
  }
  return m;
}

void save_model(const std::filesystem::path& path, const PsvmModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << model_to_json(model) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

PsvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace psvm
