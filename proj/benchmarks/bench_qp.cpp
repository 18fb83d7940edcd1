#include <benchmark/benchmark.h>

#include "psvm/dataset.hpp"
#include "psvm/kernel.hpp"
#include "psvm/model.hpp"
#include "psvm/qp.hpp"

namespace {

using namespace psvm;

const GaussianSpec kSpec2d{{-0.3, -0.5}, {0.3, 0.5}, 0.7, 0.5};

TrainingSet semi_set(std::size_t n, double eta) {
  const auto pts = gen_gaussian(kSpec2d, n, 17);
  std::vector<double> probs;
  for (const auto& p : pts) probs.push_back(p.posterior);
  return make_semi_set(pts, probs, eta);
}

DualProblem repro_problem(std::size_t n) {
  const auto set = semi_set(n, 0.1);
  std::vector<TargetBand> bands;
  for (const auto& sp : set.soft()) bands.push_back(band(sp.p, PrecisionConfig::from_eta(0.1)));
  return assemble(build_blocks(set, RbfKernel{1.0}), bands, 100.0, 100.0, set.hard_labels());
}

void BM_BuildAndAssemble(benchmark::State& state) {
  const auto set = semi_set(static_cast<std::size_t>(state.range(0)), 0.1);
  std::vector<TargetBand> bands;
  for (const auto& sp : set.soft()) bands.push_back(band(sp.p, PrecisionConfig::from_eta(0.1)));
  for (auto _ : state) {
    auto p = assemble(build_blocks(set, RbfKernel{1.0}), bands, 100.0, 100.0, set.hard_labels());
    benchmark::DoNotOptimize(p.G.data().data());
  }
}
BENCHMARK(BM_BuildAndAssemble)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SolveSmo(benchmark::State& state) {
  const auto problem = repro_problem(static_cast<std::size_t>(state.range(0)));
  std::int64_t iterations = 0;
  for (auto _ : state) {
    const auto sol = solve_smo(problem, {});
    iterations = sol.iterations;
    benchmark::DoNotOptimize(sol.objective);
  }
  state.counters["pair_updates"] = static_cast<double>(iterations);
}
BENCHMARK(BM_SolveSmo)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_TrainPsvm(benchmark::State& state) {
  const auto set = semi_set(200, 0.1);
  TrainConfig cfg;
  cfg.kernel = RbfKernel{1.0};
  for (auto _ : state) {
    auto m = train_psvm(set, cfg);
    benchmark::DoNotOptimize(m.bias);
  }
}
BENCHMARK(BM_TrainPsvm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
