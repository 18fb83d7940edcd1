#include <algorithm>
#include <ostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "psvm/error.hpp"

namespace psvm::cli {

namespace {

void add_shared_flags(CLI::App& app, Options& opt) {
  app.add_option("--method", opt.method, "psvm or csvm")->check(CLI::IsMember({"psvm", "csvm"}));
  app.add_option("--eta", opt.eta, "probability tolerance eta = epsilon + delta, in (0, 0.5) [0.1]");
  app.add_option("--C", opt.C, "penalty on hard-label slacks [100]");
  app.add_option("--C-tilde", opt.C_tilde, "penalty on soft-label slacks [100]");
  app.add_option("--sigma", opt.sigma, "RBF width [0.5 in 1D, 1.0 otherwise]");
  app.add_option("--kernel", opt.kernel, "rbf or linear")->check(CLI::IsMember({"rbf", "linear"}));
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--noise-amplitude", opt.noise_amplitudes,
                 "half-width of uniform noise on training probabilities; a list for sweeps")
      ->delimiter(',');
  app.add_option("--repetitions", opt.repetitions, "seeds per experiment cell");
  app.add_option("--n-learn", opt.n_learn, "training points per repetition [200]");
  app.add_option("--n-test", opt.n_test, "test points per repetition [1000]");
  app.add_option("--platt-folds", opt.platt_folds, "0: calibrate on training scores; k>=2: k-fold");
  app.add_option("--threads", opt.threads, "worker cap (also PSVM_THREADS)");
  app.add_option("--kkt-tolerance", opt.kkt_tolerance, "solver stopping tolerance [1e-5]");
  app.add_option("--max-iterations", opt.max_iterations, "solver pair-update budget [1e7]");
  app.add_flag("--strict", opt.strict, "exit 3 when the solver does not converge");
  app.add_flag("--binary-kl", opt.binary_kl, "also report the two-sided binary KL");
  app.add_option("--out", opt.out, "output file or directory");
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Support vector machines with hard and probabilistic labels", "psvm"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file with flag defaults (flags override it)");

  Options opt;
  add_shared_flags(app, opt);

  auto* gen = app.add_subcommand("gen", "write train/test CSVs for an experiment");
  gen->add_option("--experiment", opt.experiment, "repro1d, repro2d or noise_sweep");

  auto* train = app.add_subcommand("train", "fit a model to a dataset CSV");
  train->add_option("dataset", opt.dataset, "dataset CSV")->required();

  auto* predict = app.add_subcommand("predict", "score a dataset with a saved model");
  predict->add_option("model", opt.model, "model JSON")->required();
  predict->add_option("dataset", opt.dataset, "dataset CSV")->required();

  auto* eval = app.add_subcommand("eval", "accuracy/KL report and curves for a test CSV");
  eval->add_option("model", opt.model, "model JSON")->required();
  eval->add_option("dataset", opt.dataset, "test CSV")->required();

  auto* experiment = app.add_subcommand("experiment", "run a reproduction experiment");
  experiment->add_option("experiment", opt.experiment, "repro1d, repro2d or noise_sweep")->required();

  try {
    // CLI11 expects the arguments in reverse order
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*gen) return cmd_gen(opt, out);
    if (*train) return cmd_train(opt, out);
    if (*predict) return cmd_predict(opt, out);
    if (*eval) return cmd_eval(opt, out);
    if (*experiment) return cmd_experiment(opt, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DegenerateLink& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace psvm::cli
