#include <benchmark/benchmark.h>

#include "stabletail/random.hpp"
#include "stabletail/stable_univariate.hpp"

using namespace stabletail;

static void BM_Pdf(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0)) / 10.0;
  const auto& law = stable_law(a);
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(law.pdf(x));
    x = x * 1.7 > 1e4 ? 0.1 : x * 1.7;
  }
}
BENCHMARK(BM_Pdf)->Arg(5)->Arg(10)->Arg(15);

static void BM_Cdf(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0)) / 10.0;
  const auto& law = stable_law(a);
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(law.cdf(x));
    x = x * 1.7 > 1e4 ? 0.1 : x * 1.7;
  }
}
BENCHMARK(BM_Cdf)->Arg(5)->Arg(10)->Arg(15);

static void BM_IntervalProbability(benchmark::State& state) {
  const auto& law = stable_law(0.7);
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(law.interval_probability(x, 2.0 * x));
    x = x * 1.3 > 1e6 ? 0.1 : x * 1.3;
  }
}
BENCHMARK(BM_IntervalProbability);

static void BM_Sample(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0)) / 10.0;
  const auto& law = stable_law(a);
  RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(law.sample(rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Sample)->Arg(5)->Arg(10)->Arg(15);
