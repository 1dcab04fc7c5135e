#include <benchmark/benchmark.h>

#include "cdmgen/astro.hpp"
#include "cdmgen/propagation.hpp"

using namespace cdmgen;

static void BM_SolveKepler(benchmark::State& state) {
  const double e = static_cast<double>(state.range(0)) / 100.0;
  double m = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(astro::solve_kepler(m, e));
    m += 0.37;
  }
}
BENCHMARK(BM_SolveKepler)->Arg(0)->Arg(1)->Arg(50)->Arg(95);

static astro::OrbitalElements leo() {
  astro::OrbitalElements el;
  el.semi_major_axis = 6900.0;
  el.eccentricity = 0.001;
  el.inclination = 1.7;
  el.raan = 0.3;
  el.arg_perigee = 1.1;
  el.mean_anomaly = 2.0;
  el.bstar = 1e-4;
  return el;
}

static void BM_Propagate(benchmark::State& state) {
  prop::PropagatorSpec spec;
  spec.kind = static_cast<prop::PropagatorKind>(state.range(0));
  const auto el = leo();
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prop::propagate(el, astro::Epoch(t), spec));
    t += 10.0;
  }
}
BENCHMARK(BM_Propagate)->Arg(0)->Arg(1)->Arg(2);

static void BM_StateToElements(benchmark::State& state) {
  const auto sv = astro::elements_to_state(leo());
  for (auto _ : state) benchmark::DoNotOptimize(astro::state_to_elements(sv));
}
BENCHMARK(BM_StateToElements);

BENCHMARK_MAIN();
