#include <benchmark/benchmark.h>

#include "cdmgen/cdm.hpp"

using namespace cdmgen;

static void BM_MonteCarloCovariance(benchmark::State& state) {
  astro::OrbitalElements el;
  el.semi_major_axis = 6900.0;
  el.eccentricity = 0.002;
  el.inclination = 1.7;
  el.bstar = 1e-4;
  const auto observed = astro::elements_to_state(el);
  const auto sensor = cdm::default_chaser_sensor();
  const prop::PropagatorSpec spec;
  RandomStream rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdm::propagate_uncertainty_mc(observed, sensor, astro::Epoch::from_days(3.0), spec,
                                                           static_cast<std::size_t>(state.range(0)), rng, el.bstar));
  }
}
BENCHMARK(BM_MonteCarloCovariance)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_CollisionProbability(benchmark::State& state) {
  Mat6 cov = Mat6::Zero();
  cov.topLeftCorner<3, 3>().diagonal() << 1.0, 0.04, 0.25;
  const Vec3 miss(0.5, 0.0, 0.1);
  const Vec3 vel(0.0, 14.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(cdm::collision_probability_2d(miss, vel, cov, 0.05));
}
BENCHMARK(BM_CollisionProbability)->Unit(benchmark::kMicrosecond);
