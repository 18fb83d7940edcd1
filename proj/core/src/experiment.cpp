#include "psvm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "psvm/calibration.hpp"
#include "psvm/error.hpp"
#include "psvm/rng.hpp"

namespace psvm {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::repro1d: return "repro1d";
    case ExperimentKind::repro2d: return "repro2d";
    case ExperimentKind::noise_sweep: return "noise_sweep";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "repro1d") return ExperimentKind::repro1d;
  if (name == "repro2d") return ExperimentKind::repro2d;
  if (name == "noise_sweep") return ExperimentKind::noise_sweep;
  throw InvalidArgument("unknown experiment '" + name + "' (expected repro1d, repro2d or noise_sweep)");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  switch (kind) {
    case ExperimentKind::repro1d:
      cfg.sigma = 0.5;
      cfg.noise_amplitudes = {0.0};
      cfg.repetitions = 10;
      break;
    case ExperimentKind::repro2d:
      cfg.sigma = 1.0;
      cfg.noise_amplitudes = {0.1};
      cfg.repetitions = 10;
      break;
    case ExperimentKind::noise_sweep:
      cfg.sigma = 1.0;
      cfg.noise_amplitudes.clear();
      for (int k = 0; k <= 10; ++k) cfg.noise_amplitudes.push_back(0.05 * k);
      cfg.repetitions = 30;
      break;
  }
  return cfg;
}

GaussianSpec ExperimentConfig::gaussian() const {
  if (experiment == ExperimentKind::repro1d) return {{-0.5}, {0.5}, 0.3, 0.5};
  return {{-0.3, -0.5}, {0.3, 0.5}, 0.7, 0.5};
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.C = C;
  t.C_tilde = C_tilde;
  t.kernel = RbfKernel{sigma};
  t.precision = PrecisionConfig::from_eta(eta);
  t.solver = solver;
  return t;
}

void ExperimentConfig::validate() const {
  if (n_learn == 0 || n_test == 0) throw InvalidArgument("n_learn and n_test must be positive");
  if (!(eta > 0.0 && eta < 0.5)) throw InvalidArgument("eta must lie in (0, 0.5)");
  if (repetitions == 0) throw InvalidArgument("repetitions must be at least 1");
  if (noise_amplitudes.empty()) throw InvalidArgument("at least one noise amplitude is required");
  for (double a : noise_amplitudes) {
    if (!(a >= 0.0)) throw InvalidArgument("noise amplitudes must be non-negative");
  }
  if (platt_folds == 1) throw InvalidArgument("platt_folds must be 0 or at least 2");
  train_config().validate();
}

TrialData make_trial_data(const ExperimentConfig& cfg, double amplitude, std::size_t amplitude_index,
                          std::size_t repetition) {
  // data depends on the repetition only, so every amplitude sees the same points
  const std::uint64_t data_seed = derive_seed(cfg.seed, repetition);
  const GaussianSpec spec = cfg.gaussian();

  TrialData d;
  d.train = gen_gaussian(spec, cfg.n_learn, derive_seed(data_seed, 0));
  d.test = gen_gaussian(spec, cfg.n_test, derive_seed(data_seed, 1));
  std::vector<double> clean;
  clean.reserve(d.train.size());
  for (const auto& p : d.train) clean.push_back(p.posterior);
  d.train_probs = add_uniform_noise(clean, amplitude, derive_seed(data_seed, 100 + amplitude_index));
  return d;
}

namespace {

std::vector<double> training_scores(const PsvmModel& model, const TrainingSet& set) {
  std::vector<double> s;
  s.reserve(set.n());
  for (const auto& h : set.hard()) s.push_back(decision(model, h.x));
  return s;
}

bool has_both_classes(std::span<const int> y) {
  return std::find(y.begin(), y.end(), 1) != y.end() && std::find(y.begin(), y.end(), -1) != y.end();
}

}  // namespace

PsvmModel train_csvm_with_platt(const TrainingSet& hard_set, const TrainConfig& tc,
                                std::size_t platt_folds) {
  PsvmModel model = train_csvm(hard_set, tc);
  const auto labels = hard_set.hard_labels();

  if (platt_folds < 2) {
    model.platt = fit_platt(training_scores(model, hard_set), labels);
    return model;
  }

  // out-of-fold scores: point i belongs to fold i % k
  std::vector<double> oof(hard_set.n(), 0.0);
  for (std::size_t fold = 0; fold < platt_folds; ++fold) {
    TrainingSet part;
    for (std::size_t i = 0; i < hard_set.n(); ++i) {
      if (i % platt_folds != fold) part.add_hard(hard_set.hard()[i].x, hard_set.hard()[i].y);
    }
    const auto part_labels = part.hard_labels();
    if (part.empty() || !has_both_classes(part_labels)) {
      throw InvalidArgument("platt cross-validation fold lacks one of the classes");
    }
    const PsvmModel fold_model = train_csvm(part, tc);
    for (std::size_t i = fold; i < hard_set.n(); i += platt_folds) {
      oof[i] = decision(fold_model, hard_set.hard()[i].x);
    }
  }
  model.platt = fit_platt(oof, labels);
  return model;
}

MetricsReport evaluate(const PsvmModel& model, std::span<const GeneratedPoint> test) {
  std::vector<PointRecord> records;
  records.reserve(test.size());
  for (const auto& pt : test) {
    const double s = decision(model, pt.x);
    PointRecord r;
    r.true_p = pt.posterior;
    r.true_y = label_hard(pt.posterior).y;
    r.pred_y = s >= 0.0 ? 1 : -1;
    r.pred_p = model.platt ? apply_platt(*model.platt, s) : prob_from_score(s, model.link);
    records.push_back(r);
  }
  return summarize(std::move(records));
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t amplitude_index, std::size_t repetition) {
  const double amplitude = cfg.noise_amplitudes.at(amplitude_index);
  const TrialData data = make_trial_data(cfg, amplitude, amplitude_index, repetition);

  const TrainingSet hard_set = make_hard_set(data.train, data.train_probs);
  const TrainingSet semi_set = make_semi_set(data.train, data.train_probs, cfg.eta);

  const PsvmModel csvm = train_csvm_with_platt(hard_set, cfg.train_config(), cfg.platt_folds);
  const PsvmModel psvm = train_psvm(semi_set, cfg.train_config());

  const MetricsReport rc = evaluate(csvm, data.test);
  const MetricsReport rp = evaluate(psvm, data.test);

  TrialResult t;
  t.amplitude_index = amplitude_index;
  t.amplitude = amplitude;
  t.repetition = repetition;
  t.data_seed = derive_seed(cfg.seed, repetition);
  t.psvm = {rp.accuracy, rp.kl.value_or(0.0), psvm.diagnostics.converged};
  t.csvm = {rc.accuracy, rc.kl.value_or(0.0), csvm.diagnostics.converged};
  if (repetition == 0) {
    t.curve.reserve(data.test.size());
    for (std::size_t i = 0; i < data.test.size(); ++i) {
      t.curve.push_back({data.test[i].x, data.test[i].posterior, rp.per_point[i].pred_p,
                         rp.per_point[i].pred_y, rc.per_point[i].pred_p, rc.per_point[i].pred_y});
    }
  }
  return t;
}

std::size_t worker_count(std::size_t cap) {
  if (cap > 0) return cap;
  if (const char* env = std::getenv("PSVM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

std::vector<CellSummary> summarize_trials(const ExperimentConfig& cfg,
                                          const std::vector<TrialResult>& trials) {
  std::vector<CellSummary> out;
  for (std::size_t a = 0; a < cfg.noise_amplitudes.size(); ++a) {
    for (const char* method : {"psvm", "csvm"}) {
      std::vector<double> acc, kl;
      for (const auto& t : trials) {
        if (t.amplitude_index != a) continue;
        const MethodScores& ms = std::string(method) == "psvm" ? t.psvm : t.csvm;
        acc.push_back(ms.accuracy);
        kl.push_back(ms.kl);
      }
      if (acc.empty()) continue;
      out.push_back({cfg.noise_amplitudes[a], method, mean(acc), stddev(acc), mean(kl), stddev(kl),
                     median(acc), median(kl)});
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t jobs = cfg.noise_amplitudes.size() * cfg.repetitions;

  ExperimentReport report;
  report.config = cfg;
  report.trials.resize(jobs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      try {
        report.trials[job] = run_trial(cfg, job / cfg.repetitions, job % cfg.repetitions);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t n_workers = std::min(jobs, worker_count(cfg.threads));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  report.summary = summarize_trials(cfg, report.trials);
  return report;
}

}  // namespace psvm
