#include <vector>

#include <benchmark/benchmark.h>

#include "taxai/environment.hpp"

namespace {

using namespace taxai;

// One environment step under the fixed profile that survives the full
// horizon; the episode is reset (untimed) when it ends.
void BM_EnvStep(benchmark::State& state) {
  EnvConfig cfg;
  cfg.model.n_households = static_cast<int>(state.range(0));
  cfg.threads = static_cast<int>(state.range(1));
  Environment env(cfg);
  env.reset(0);
  const GovernmentAction gov{0.6, 0.6, 0.2, 0.3, 0.1};
  const std::vector<HouseholdAction> actions(env.household_count(), {0.9, 0.3});
  std::uint64_t episode = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.step(gov, actions));
    if (env.done()) {
      state.PauseTiming();
      env.reset(++episode);
      state.ResumeTiming();
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvStep)->ArgsProduct({{10, 100, 1000, 10000}, {1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EnvStep)->Args({10000, 4})->Unit(benchmark::kMicrosecond);

void BM_Reset(benchmark::State& state) {
  EnvConfig cfg;
  cfg.model.n_households = static_cast<int>(state.range(0));
  Environment env(cfg);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(env.reset(seed++));
}
BENCHMARK(BM_Reset)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace
