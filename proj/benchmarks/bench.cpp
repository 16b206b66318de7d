#include <benchmark/benchmark.h>

#include "belllab/conditions.hpp"
#include "belllab/inequality.hpp"
#include "belllab/montecarlo.hpp"
#include "belllab/theories.hpp"

namespace {

using namespace belllab;

constexpr double kPi = 3.14159265358979323846;

std::vector<Direction> standard_settings() {
  return {Direction::from_plane_angle(0.0),
          Direction::from_plane_angle(kPi / 4.0),
          Direction::from_plane_angle(kPi / 2.0),
          Direction::from_plane_angle(3.0 * kPi / 4.0)};
}

void BM_DecompositionSinglet(benchmark::State& state) {
  const Theory t = qm_singlet_theory();
  const AuditGrid grid = AuditGrid::make_default(t);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_decomposition(t, grid));
  }
}
BENCHMARK(BM_DecompositionSinglet);

// Audit cost scales with the sampled state count.
void BM_AuditSampledStates(benchmark::State& state) {
  const Theory t = classical_antiparallel_theory();
  AuditGrid::Options options;
  options.state_samples = static_cast<int>(state.range(0));
  const AuditGrid grid = AuditGrid::make_default(t, options);
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_outcome_independence(t, grid));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AuditSampledStates)->Arg(64)->Arg(256)->Arg(512)->Complexity();

void BM_ChshValue(benchmark::State& state) {
  const Theory t = qm_singlet_theory();
  const ChshSettings settings = ChshSettings::standard();
  for (auto _ : state) {
    benchmark::DoNotOptimize(chsh_value(t, settings));
  }
}
BENCHMARK(BM_ChshValue);

void BM_ChshSearchClassical(benchmark::State& state) {
  const Theory t = classical_antiparallel_theory();
  for (auto _ : state) {
    benchmark::DoNotOptimize(chsh_search(t));
  }
}
BENCHMARK(BM_ChshSearchClassical);

void BM_LhvBound(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lhv_bound_bruteforce(n, n));
  }
}
BENCHMARK(BM_LhvBound)->Arg(2)->Arg(4)->Arg(6);

// Trial throughput by worker count; items = trials.
void BM_RunTrials(benchmark::State& state) {
  const Theory t = qm_singlet_theory();
  const auto settings = standard_settings();
  const std::int64_t trials = 1 << 14;
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_trials(t, settings, settings, trials, 1729, workers));
  }
  state.SetItemsProcessed(state.iterations() * trials);
}
// Wall time, not main-thread CPU time: the work happens on worker threads.
BENCHMARK(BM_RunTrials)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
