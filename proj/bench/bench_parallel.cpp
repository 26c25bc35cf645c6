// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "tariffkit/calibration.hpp"
#include "tariffkit/montecarlo.hpp"
#include "tariffkit/presets.hpp"

using namespace tariffkit;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

void BM_MonteCarlo(benchmark::State& state, const char* name) {
  ExperimentConfig c = default_experiment(name);
  c.reps = static_cast<std::size_t>(state.range(0));
  c.seed = 42;
  c.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetLabel(std::string(to_string(c.exec)));
}

void BM_Calibration(benchmark::State& state) {
  const PresetBundle b = preset("paper2018");
  const CalibrationProblem problem = calibration_problem(b);
  CalibrationGrid grid = b.grid;
  // Densify the grid by the requested factor along the China elasticity.
  std::vector<double> dense;
  const auto& base = grid.eta_d_china;
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    for (int j = 0; j < state.range(0); ++j) {
      dense.push_back(base[i] + (base[i + 1] - base[i]) * j / static_cast<double>(state.range(0)));
    }
  }
  dense.push_back(base.back());
  grid.eta_d_china = dense;
  const Execution exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_to_targets(problem, b.targets, grid, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
  state.SetLabel(std::string(to_string(exec)));
}

}  // namespace

BENCHMARK_CAPTURE(BM_MonteCarlo, did_recovery, "did-recovery")
    ->ArgsProduct({{200}, {0, 1}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, table1, "table1")
    ->ArgsProduct({{1000}, {0, 1}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, svar_recovery, "svar-recovery")
    ->ArgsProduct({{20}, {0, 1}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Calibration)->ArgsProduct({{1, 8}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
