#include <benchmark/benchmark.h>

#include "cdmgen/conjunction.hpp"
#include "cdmgen/population.hpp"
#include "cdmgen/random.hpp"

using namespace cdmgen;

// Screens random prior pairs over the default week.
static void BM_ScreenRandomPairs(benchmark::State& state) {
  const auto prior = population::default_prior();
  const prop::PropagatorSpec spec;
  const conjunction::TimeWindow window{astro::Epoch(0.0), astro::Epoch::from_days(7.0)};
  RandomStream rng(42);
  for (auto _ : state) {
    const auto a = population::sample_object(prior, rng);
    const auto b = population::sample_object(prior, rng);
    benchmark::DoNotOptimize(conjunction::screen_pair(a, b, window, spec));
  }
}
BENCHMARK(BM_ScreenRandomPairs)->Unit(benchmark::kMillisecond);

static void BM_RefineTca(benchmark::State& state) {
  astro::OrbitalElements a;
  a.semi_major_axis = 7000.0;
  a.inclination = 0.9;
  auto b = a;
  b.inclination = 1.2;
  const prop::PropagatorSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        conjunction::refine_tca(a, b, {astro::Epoch(-10.0), astro::Epoch(10.0)}, spec));
  }
}
BENCHMARK(BM_RefineTca)->Unit(benchmark::kMicrosecond);
