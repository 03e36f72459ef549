#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "taxai/econ.hpp"
#include "taxai/metrics.hpp"

namespace {

using namespace taxai;

std::vector<double> lognormal(std::size_t n) {
  std::mt19937_64 rng(1);
  std::lognormal_distribution<double> d(5.0, 1.5);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void BM_Gini(benchmark::State& state) {
  const auto v = lognormal(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::gini(v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gini)->RangeMultiplier(10)->Range(10, 100000)->Complexity(benchmark::oNLogN);

void BM_HsvTaxes(benchmark::State& state) {
  const auto v = lognormal(static_cast<std::size_t>(state.range(0)));
  const TaxSchedule s{0.2, 0.05, 0.5, 0.05};
  for (auto _ : state) {
    double total = 0.0;
    for (double x : v) total += econ::income_tax(x, s) + econ::asset_tax(x, s);
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HsvTaxes)->Arg(10000);

void BM_ProductivityStep(benchmark::State& state) {
  const ModelParams p;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u;
  HouseholdState h{0.0, 1.0, Regime::Normal};
  for (auto _ : state) {
    h = econ::productivity_step(h, n01(rng), u(rng), 100.0, p);
    benchmark::DoNotOptimize(h);
  }
}
BENCHMARK(BM_ProductivityStep);

}  // namespace
