// Serial reference vs OpenMP kernels. Both backends are bit-identical by
// contract (the tests enforce it); this target measures what the parallel
// path actually buys on the current machine.

#include <benchmark/benchmark.h>

#include "bellsim/engine.hpp"
#include "bellsim/hpdensity.hpp"

using namespace bellsim;

namespace {

ExperimentConfig trial_config(const std::string& model, std::uint64_t trials) {
  ExperimentConfig cfg;
  cfg.model = builtin_descriptor(model);
  cfg.trials = trials;
  cfg.seed = 12345;
  return cfg;
}

void BM_trials(benchmark::State& state, const std::string& model,
               Backend backend) {
  const ExperimentConfig cfg = trial_config(model, 100000);
  for (auto _ : state) {
    TrialLog log = run_experiment(cfg, backend);
    benchmark::DoNotOptimize(log.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(cfg.trials));
}

void BM_quadrature(benchmark::State& state, Backend backend) {
  const SlabDensitySpec spec =
      reference_family(direction_in_plane(30.0), direction_in_plane(60.0), 4);
  const OutcomeFields fields = unit_outcome_fields();
  QuadratureConfig quad;
  quad.cells_per_unit = 128;
  for (auto _ : state) {
    Integral result = expectation(spec, fields, quad, backend);
    benchmark::DoNotOptimize(result.value);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_trials, uniform_serial, "uniform-lhv", Backend::serial);
BENCHMARK_CAPTURE(BM_trials, uniform_openmp, "uniform-lhv", Backend::openmp);
BENCHMARK_CAPTURE(BM_trials, singlet_serial, "singlet", Backend::serial);
BENCHMARK_CAPTURE(BM_trials, singlet_openmp, "singlet", Backend::openmp);
BENCHMARK_CAPTURE(BM_quadrature, serial, Backend::serial);
BENCHMARK_CAPTURE(BM_quadrature, openmp, Backend::openmp);

BENCHMARK_MAIN();
