#include <benchmark/benchmark.h>

#include "starosc/equilibrium.hpp"

using namespace starosc;

static EosSpec referenceSpec() {
  EosSpec s;
  s.gamma = 1.5;
  s.c_v = 1.0;
  s.grav_const = 1.0;
  s.sigma = SigmaLaw::polynomial({0.0, -0.05});
  return s;
}

static void BM_BuildEquilibrium(benchmark::State& state) {
  EosSpec spec = referenceSpec();
  for (auto _ : state) {
    EquilibriumStar star = buildEquilibrium(spec, 1.0);
    benchmark::DoNotOptimize(star.radius());
  }
}
BENCHMARK(BM_BuildEquilibrium);

static void BM_PointState(benchmark::State& state) {
  EquilibriumStar star = buildEquilibrium(referenceSpec(), 1.0);
  double r = 0.5 * star.radius();
  for (auto _ : state) {
    PointState p = star.state(r);
    benchmark::DoNotOptimize(p.N2);
  }
}
BENCHMARK(BM_PointState);

BENCHMARK_MAIN();
