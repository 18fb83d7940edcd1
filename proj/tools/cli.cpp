#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "psvm/error.hpp"
#include "psvm/format.hpp"

namespace psvm::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

double default_sigma(std::size_t dim) { return dim <= 1 ? 0.5 : 1.0; }

TrainConfig train_config(const Options& opt, std::size_t dim) {
  TrainConfig tc;
  tc.C = opt.C.value_or(100.0);
  tc.C_tilde = opt.C_tilde.value_or(100.0);
  tc.precision = PrecisionConfig::from_eta(opt.eta.value_or(0.1));
  tc.solver.kkt_tolerance = opt.kkt_tolerance;
  tc.solver.max_iterations = opt.max_iterations;
  if (opt.kernel == "linear") {
    tc.kernel = LinearKernel{};
  } else if (opt.kernel == "rbf") {
    tc.kernel = RbfKernel{opt.sigma.value_or(default_sigma(dim))};
  } else {
    throw InvalidArgument("unknown kernel '" + opt.kernel + "'");
  }
  tc.validate();
  return tc;
}

}  // namespace

ExperimentConfig experiment_config(const Options& opt) {
  ExperimentConfig cfg = ExperimentConfig::defaults(parse_experiment_kind(opt.experiment));
  if (opt.n_learn) cfg.n_learn = *opt.n_learn;
  if (opt.n_test) cfg.n_test = *opt.n_test;
  if (opt.eta) cfg.eta = *opt.eta;
  if (opt.C) cfg.C = *opt.C;
  if (opt.C_tilde) cfg.C_tilde = *opt.C_tilde;
  if (opt.sigma) cfg.sigma = *opt.sigma;
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.noise_amplitudes.empty()) cfg.noise_amplitudes = opt.noise_amplitudes;
  if (opt.repetitions) cfg.repetitions = *opt.repetitions;
  cfg.platt_folds = opt.platt_folds;
  cfg.threads = opt.threads;
  cfg.solver.kkt_tolerance = opt.kkt_tolerance;
  cfg.solver.max_iterations = opt.max_iterations;
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& opt, std::ostream& log) {
  const ExperimentConfig cfg = experiment_config(opt);
  if (opt.out.empty()) throw InvalidArgument("gen: --out <directory> is required");
  const double amplitude = cfg.noise_amplitudes.front();
  const TrialData data = make_trial_data(cfg, amplitude, 0, 0);

  Dataset hard, semi, test;
  for (std::size_t i = 0; i < data.train.size(); ++i) {
    const auto& pt = data.train[i];
    hard.rows.push_back({pt.x, label_hard(data.train_probs[i]), pt.posterior});
    semi.rows.push_back({pt.x, label_semi(data.train_probs[i], cfg.eta), pt.posterior});
  }
  for (const auto& pt : data.test) test.rows.push_back({pt.x, label_hard(pt.posterior), pt.posterior});

  fs::create_directories(opt.out);
  write_dataset_csv(opt.out / "train_hard.csv", hard);
  write_dataset_csv(opt.out / "train_semi.csv", semi);
  write_dataset_csv(opt.out / "test.csv", test);
  log << "wrote " << hard.rows.size() << " training rows (hard and semi labelings) and "
      << test.rows.size() << " test rows to " << opt.out.string() << '\n';
  return kSuccess;
}

int cmd_train(const Options& opt, std::ostream& log) {
  if (opt.method != "psvm" && opt.method != "csvm") {
    throw InvalidArgument("--method must be psvm or csvm");
  }
  if (opt.out.empty()) throw InvalidArgument("train: --out <model.json> is required");
  const Dataset data = read_dataset_csv(opt.dataset);
  if (data.rows.empty()) throw DataError(opt.dataset.string() + ": no rows");
  const TrainingSet set = data.to_training_set();
  const TrainConfig tc = train_config(opt, set.dim());

  PsvmModel model;
  if (opt.method == "csvm") {
    if (!set.soft().empty()) {
      throw DataError("csvm needs hard labels only; " + opt.dataset.string() + " has " +
                      std::to_string(set.soft().size()) + " soft rows");
    }
    model = train_csvm_with_platt(set, tc, opt.platt_folds);
  } else {
    model = train_psvm(set, tc);
    model.method = "psvm";
  }
  model.seed = opt.seed;
  save_model(opt.out, model);

  log << "trained " << model.method << " on " << set.n() << " hard + " << set.soft().size()
      << " soft points: " << model.coefficients.size() << " support points, bias " << model.bias
      << ", converged=" << (model.diagnostics.converged ? "true" : "false")
      << '\n';
  for (const auto& w : model.warnings) log << "warning: " << w << '\n';
  if (!model.diagnostics.converged && opt.strict) return kConvergenceFailure;
  return kSuccess;
}

namespace {

double model_probability(const PsvmModel& model, double score) {
  return model.platt ? apply_platt(*model.platt, score) : prob_from_score(score, model.link);
}

void check_dim(const PsvmModel& model, const Dataset& data, const fs::path& path) {
  if (!data.rows.empty() && data.dim() != model.dim) {
    throw DataError(path.string() + " has dimension " + std::to_string(data.dim()) +
                    " but the model expects " + std::to_string(model.dim));
  }
}

}  // namespace

int cmd_predict(const Options& opt, std::ostream& log) {
  const PsvmModel model = load_model(opt.model);
  const Dataset data = read_dataset_csv(opt.dataset);
  check_dim(model, data, opt.dataset);

  std::ofstream file;
  std::ostream* out = &log;
  if (!opt.out.empty()) {
    file = open_out(opt.out);
    out = &file;
  }
  for (std::size_t k = 0; k < model.dim; ++k) *out << 'x' << (k + 1) << ',';
  *out << "score,pred_p,pred_y\n";
  for (const auto& row : data.rows) {
    const double s = decision(model, row.x);
    for (double v : row.x) *out << format_double(v) << ',';
    *out << format_double(s) << ',' << format_double(model_probability(model, s)) << ','
         << (s >= 0.0 ? 1 : -1) << '\n';
  }
  return kSuccess;
}

int cmd_eval(const Options& opt, std::ostream& log) {
  if (opt.out.empty()) throw InvalidArgument("eval: --out <directory> is required");
  const PsvmModel model = load_model(opt.model);
  const Dataset data = read_dataset_csv(opt.dataset);
  if (data.rows.empty()) throw DataError(opt.dataset.string() + ": no rows");
  check_dim(model, data, opt.dataset);

  std::vector<PointRecord> records;
  std::vector<Sample> xs;
  for (const auto& row : data.rows) {
    const double s = decision(model, row.x);
    PointRecord r;
    r.true_p = row.posterior;
    if (const auto* h = std::get_if<HardLabel>(&row.label)) {
      r.true_y = h->y;
    } else {
      r.true_y = label_hard(std::get<SoftLabel>(row.label).p).y;
    }
    r.pred_y = s >= 0.0 ? 1 : -1;
    r.pred_p = model_probability(model, s);
    records.push_back(r);
    xs.push_back(row.x);
  }
  const MetricsReport report = summarize(std::move(records), opt.binary_kl);

  nlohmann::json echo;
  echo["model"] = opt.model.string();
  echo["test"] = opt.dataset.string();
  echo["C"] = model.C;
  echo["C_tilde"] = model.C_tilde;
  echo["eta"] = model.eta;
  echo["kernel"] = describe(model.kernel);
  echo["probability"] = model.platt ? "platt" : "link";

  fs::create_directories(opt.out);
  open_out(opt.out / "metrics.json") << metrics_to_json(report, model.method, model.seed, echo.dump())
                                     << '\n';
  write_curves_csv(opt.out / "curves.csv", xs, report);

  log << model.method << ": accuracy " << report.accuracy;
  if (report.kl) {
    log << ", kl " << *report.kl;
  } else {
    log << " (no true posteriors: kl omitted)";
  }
  log << " over " << report.count << " points\n";
  return kSuccess;
}

int cmd_experiment(const Options& opt, std::ostream& log) {
  const ExperimentConfig cfg = experiment_config(opt);
  const ExperimentReport report = run_experiment(cfg);

  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    write_summary_csv(opt.out / "summary.csv", report.summary);
    write_trials_csv(opt.out / "trials.csv", report.trials);

    nlohmann::json j;
    j["experiment"] = to_string(cfg.experiment);
    j["seed"] = cfg.seed;
    j["config"] = {{"n_learn", cfg.n_learn},   {"n_test", cfg.n_test},
                   {"eta", cfg.eta},           {"C", cfg.C},
                   {"C_tilde", cfg.C_tilde},   {"sigma", cfg.sigma},
                   {"noise_amplitudes", cfg.noise_amplitudes},
                   {"repetitions", cfg.repetitions},
                   {"platt_folds", cfg.platt_folds}};
    for (const auto& row : report.summary) {
      j["cells"].push_back({{"amplitude", row.amplitude}, {"method", row.method},
                            {"acc_mean", row.acc_mean}, {"acc_std", row.acc_std},
                            {"acc_median", row.acc_median}, {"kl_mean", row.kl_mean},
                            {"kl_std", row.kl_std}, {"kl_median", row.kl_median}});
    }
    std::size_t unconverged = 0;
    for (const auto& t : report.trials) unconverged += (!t.psvm.converged) + (!t.csvm.converged);
    j["unconverged_solves"] = unconverged;
    open_out(opt.out / "summary.json") << j.dump(2) << '\n';

    if (cfg.experiment != ExperimentKind::noise_sweep && !report.trials.empty()) {
      const auto& curve = report.trials.front().curve;
      auto out = open_out(opt.out / "curves.csv");
      const std::size_t dim = curve.empty() ? 0 : curve.front().x.size();
      for (std::size_t k = 0; k < dim; ++k) out << 'x' << (k + 1) << ',';
      out << "true_p,psvm_p,psvm_y,csvm_p,csvm_y\n";
      for (const auto& c : curve) {
        for (double v : c.x) out << format_double(v) << ',';
        out << format_double(c.true_p) << ',' << format_double(c.psvm_p) << ',' << c.psvm_y << ','
            << format_double(c.csvm_p) << ',' << c.csvm_y << '\n';
      }
    }
  }

  log << to_string(cfg.experiment) << " (" << cfg.repetitions << " repetitions, seed " << cfg.seed
      << ")\n";
  log << std::left << std::setw(10) << "amplitude" << std::setw(7) << "method" << std::setw(22)
      << "accuracy mean+-std" << "kl mean+-std (median)\n";
  for (const auto& row : report.summary) {
    std::ostringstream acc, kl;
    acc << std::fixed << std::setprecision(4) << row.acc_mean << "+-" << row.acc_std;
    kl << std::fixed << std::setprecision(3) << row.kl_mean << "+-" << row.kl_std << " ("
       << row.kl_median << ")";
    log << std::left << std::setw(10) << row.amplitude << std::setw(7) << row.method << std::setw(22)
        << acc.str() << kl.str() << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------

std::string metrics_to_json(const MetricsReport& report, const std::string& method,
                            std::optional<std::uint64_t> seed, const std::string& config_echo) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  if (report.kl) j["kl"] = *report.kl;
  if (report.kl_binary) j["kl_binary"] = *report.kl_binary;
  j["count"] = report.count;
  j["method"] = method;
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  j["config"] = nlohmann::json::parse(config_echo);
  return j.dump(2);
}

void write_curves_csv(const fs::path& path, const std::vector<Sample>& xs, const MetricsReport& report) {
  auto out = open_out(path);
  const std::size_t dim = xs.empty() ? 0 : xs.front().size();
  for (std::size_t k = 0; k < dim; ++k) out << 'x' << (k + 1) << ',';
  out << "true_p,pred_p,pred_y\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& r = report.per_point[i];
    for (double v : xs[i]) out << format_double(v) << ',';
    if (r.true_p) out << format_double(*r.true_p);
    out << ',' << format_double(r.pred_p) << ',' << r.pred_y << '\n';
  }
}

void write_summary_csv(const fs::path& path, const std::vector<CellSummary>& rows) {
  auto out = open_out(path);
  out << "amplitude,method,acc_mean,acc_std,kl_mean,kl_std\n";
  for (const auto& r : rows) {
    out << format_double(r.amplitude) << ',' << r.method << ',' << format_double(r.acc_mean) << ','
        << format_double(r.acc_std) << ',' << format_double(r.kl_mean) << ','
        << format_double(r.kl_std) << '\n';
  }
}

void write_trials_csv(const fs::path& path, const std::vector<TrialResult>& trials) {
  auto out = open_out(path);
  out << "amplitude,repetition,data_seed,method,accuracy,kl,converged\n";
  for (const auto& t : trials) {
    for (const auto& [name, ms] : {std::pair{"psvm", t.psvm}, std::pair{"csvm", t.csvm}}) {
      out << format_double(t.amplitude) << ',' << t.repetition << ',' << t.data_seed << ',' << name
          << ',' << format_double(ms.accuracy) << ',' << format_double(ms.kl) << ','
          << (ms.converged ? 1 : 0) << '\n';
    }
  }
}

}  // namespace psvm::cli
