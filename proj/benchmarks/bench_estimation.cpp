#include <benchmark/benchmark.h>

#include <cmath>

#include "stabletail/mc_estimation.hpp"
#include "stabletail/tail_asymptotics.hpp"

using namespace stabletail;

namespace {

StableVectorModel shared_factor(double alpha) {
  Matrix m(2, 2);
  m << 1, 0, 1, -1;
  return from_matrix({alpha, m});
}

Region corner() {
  Vector n1(2), n2(2);
  n1 << 1, 0;
  n2 << 0, -1;
  return Region::intersection_of({Region::halfspace(n1, 1.0), Region::halfspace(n2, -1.0)});
}

Region quadrant() {
  Vector lo(2), hi(2);
  lo << 1, 1;
  hi << INFINITY, INFINITY;
  return Region::box(lo, hi);
}

}  // namespace

static void BM_LQuadratureQuadrant(benchmark::State& state) {
  const auto model = from_matrix({0.5, Matrix::Identity(2, 2)});
  const auto region = quadrant();
  for (auto _ : state) benchmark::DoNotOptimize(L_quadrature(model, region, 2, RegionVariant::closure()));
}
BENCHMARK(BM_LQuadratureQuadrant)->Unit(benchmark::kMillisecond);

static void BM_LQuadratureSharedFactor(benchmark::State& state) {
  const auto model = shared_factor(0.5);
  const auto region = corner();
  for (auto _ : state) benchmark::DoNotOptimize(L_quadrature(model, region, 2, RegionVariant::closure()));
}
BENCHMARK(BM_LQuadratureSharedFactor)->Unit(benchmark::kMillisecond);

static void BM_TheoremBounds(benchmark::State& state) {
  const auto model = from_matrix({1.0, Matrix::Identity(2, 2)});
  Vector lo(2), hi(2);
  lo << 1, -INFINITY;
  hi << INFINITY, 0;
  const auto region = Region::box(lo, hi);
  for (auto _ : state) benchmark::DoNotOptimize(theorem_bounds(model, region, 1));
}
BENCHMARK(BM_TheoremBounds)->Unit(benchmark::kMillisecond);

static void BM_EstimateCrude(benchmark::State& state) {
  const auto model = shared_factor(1.0);
  const auto region = corner();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_crude(model, region, 10.0, 100000, 1));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_EstimateCrude)->Unit(benchmark::kMillisecond);

static void BM_EstimateConditional(benchmark::State& state) {
  const auto model = shared_factor(1.0);
  const auto region = corner();
  ConditionalOptions o;
  o.sampling = state.range(0) ? ConditionalOptions::Sampling::stratified : ConditionalOptions::Sampling::iid;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_conditional(model, region, 1e4, 100000, 1, o));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_EstimateConditional)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
