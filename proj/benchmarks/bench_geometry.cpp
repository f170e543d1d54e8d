#include <benchmark/benchmark.h>

#include <cmath>

#include "stabletail/linear_program.hpp"
#include "stabletail/random.hpp"
#include "stabletail/region.hpp"

using namespace stabletail;

namespace {

Region corner_minus_ball() {
  Vector n1(2), n2(2), c(2);
  n1 << 1, 0;
  n2 << 0, -1;
  c << 1, 1;
  const auto corner = Region::intersection_of({Region::halfspace(n1, 1.0), Region::halfspace(n2, -1.0)});
  return Region::difference_with_ball(corner, c, 0.2, BallNorm::linf);
}

}  // namespace

static void BM_Contains(benchmark::State& state) {
  const CompiledRegion r(corner_minus_ball(), RegionVariant::closure());
  RandomStream rng(2);
  Vector x(2);
  for (auto _ : state) {
    x << rng.uniform(-3, 3), rng.uniform(-3, 3);
    benchmark::DoNotOptimize(r.contains(x));
  }
}
BENCHMARK(BM_Contains);

static void BM_LineClip(benchmark::State& state) {
  const CompiledRegion r(corner_minus_ball(), RegionVariant::interior());
  RandomStream rng(3);
  Vector p(2), d(2);
  d << 1, 1;
  for (auto _ : state) {
    p << 0.0, rng.uniform(-3, 3);
    benchmark::DoNotOptimize(r.line_clip(p, d));
  }
}
BENCHMARK(BM_LineClip);

static void BM_LineClipPowerRegion(benchmark::State& state) {
  const CompiledRegion r(Region::power_region(0.5), RegionVariant::interior());
  RandomStream rng(4);
  Vector p(2), d(2);
  d << 1, 0;
  for (auto _ : state) {
    p << 0.0, rng.uniform(0.0, 5.0);
    benchmark::DoNotOptimize(r.line_clip(p, d));
  }
}
BENCHMARK(BM_LineClipPowerRegion);

static void BM_SolveLp(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  RandomStream rng(5);
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd b(m), c(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = rng.uniform(0.1, 1.0);
    b[i] = rng.uniform(1.0, 2.0);
    c[i] = rng.uniform(0.1, 1.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(A, b, c));
}
BENCHMARK(BM_SolveLp)->Arg(4)->Arg(8)->Arg(16);
