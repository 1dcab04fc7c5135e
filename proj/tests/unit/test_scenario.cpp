#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "cdmgen/errors.hpp"
#include "cdmgen/io.hpp"
#include "cdmgen/numerics.hpp"
#include "cdmgen/scenario.hpp"
#include "oracles.hpp"

using namespace cdmgen;
using namespace cdmgen::scenario;
using astro::constants::kPi;
using astro::constants::kTwoPi;

namespace {

ScenarioConfig crossing_config(std::uint64_t seed, double window_days, double relative_width = 1e-9) {
  return oracle::crossing_scenario(seed, window_days, relative_width);
}

ScenarioConfig never_config() { return oracle::separated_scenario(); }

std::string serialized(const cdm::CdmSeries& s) {
  std::ostringstream out;
  io::write_cdm_series(out, s);
  return out.str();
}

EventObservation sample_observation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EventObservation o;
  o.tca = astro::Epoch(1e5 * u(rng));
  o.target = {6600.0 + 1000.0 * u(rng), 0.02 * u(rng), kPi * u(rng)};
  o.chaser = {6600.0 + 1000.0 * u(rng), 0.02 * u(rng), kPi * u(rng)};
  return o;
}

double circular_difference(double x, double y) {
  double d = std::fmod(x - y, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d < -kPi) d += kTwoPi;
  return d;
}

}  // namespace

TEST(Likelihood, MaximalAtEquality) {
  std::mt19937_64 rng(1);
  const auto o = sample_observation(rng);
  const LikelihoodSigmas s;
  const double c = 0.5 * std::log(2.0 * kPi);
  const double expected = -(std::log(s.tca_s) + c) -
                          2.0 * (std::log(s.semi_major_axis_km) + std::log(s.eccentricity) +
                                 std::log(s.inclination_rad) + 3.0 * c);
  EXPECT_NEAR(likelihood(o, o, s), expected, 1e-12);
}

TEST(Likelihood, OneSigmaOffCostsHalf) {
  std::mt19937_64 rng(2);
  const LikelihoodSigmas s;
  const auto sim = sample_observation(rng);
  const double peak = likelihood(sim, sim, s);
  auto obs = sim;
  obs.chaser.eccentricity += s.eccentricity;
  EXPECT_NEAR(likelihood(obs, sim, s), peak - 0.5, 1e-12);
  obs = sim;
  obs.tca = astro::Epoch(sim.tca.seconds - s.tca_s);
  EXPECT_NEAR(likelihood(obs, sim, s), peak - 0.5, 1e-9);
}

TEST(Likelihood, SumOfSevenIndependentTerms) {
  std::mt19937_64 rng(3);
  const LikelihoodSigmas s{45.0, 3.0, 2e-3, 0.01};
  for (int k = 0; k < 200; ++k) {
    const auto a = sample_observation(rng);
    const auto b = sample_observation(rng);
    auto term = [](double y, double mu, double sigma) { return numerics::normal_log_pdf(y, mu, sigma); };
    auto object = [&](const ObjectObservables& y, const ObjectObservables& mu) {
      return term(y.semi_major_axis, mu.semi_major_axis, s.semi_major_axis_km) +
             term(y.eccentricity, mu.eccentricity, s.eccentricity) +
             term(circular_difference(y.inclination, mu.inclination), 0.0, s.inclination_rad);
    };
    const double expected = term(a.tca.seconds, b.tca.seconds, s.tca_s) + object(a.target, b.target) +
                            object(a.chaser, b.chaser);
    ASSERT_NEAR(likelihood(a, b, s), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Likelihood, InclinationWrapsAroundTwoPi) {
  std::mt19937_64 rng(4);
  const LikelihoodSigmas s;
  const auto a = sample_observation(rng);
  auto b = a;
  b.target.inclination += kTwoPi;
  b.chaser.inclination -= kTwoPi;
  EXPECT_NEAR(likelihood(a, b, s), likelihood(a, a, s), 1e-9);
}

TEST(Generate, SeparatedPointMassesNeverConjunct) {
  const auto config = never_config();
  RandomStream rng(5);
  for (int k = 0; k < 10; ++k) EXPECT_TRUE(std::holds_alternative<NoConjunction>(generate_event(config, rng)));
}

TEST(Generate, CrossingPointMassesAlwaysConjunct) {
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    const auto config = crossing_config(seed, 7.0);
    RandomStream rng(seed);
    const auto outcome = generate_event(config, rng);
    const auto* ev = std::get_if<GeneratedEvent>(&outcome);
    ASSERT_NE(ev, nullptr) << "seed " << seed;
    EXPECT_LT(ev->event.miss_distance, 5.0);
    EXPECT_GE(ev->series.records.size(), 1u);
    EXPECT_LE(ev->series.records.size(), 21u);
  }
}

TEST(Generate, LatentSitesAppearOncePerTrace) {
  const auto sites = latent_sites();
  ASSERT_EQ(sites.size(), 14u);
  EXPECT_EQ(std::set<std::string>(sites.begin(), sites.end()).size(), 14u);
  for (const auto& config : {crossing_config(20, 1.0), never_config()}) {
    RandomStream rng(21);
    ppl::Trace trace;
    generate_event(config, rng, {}, &trace);
    ASSERT_EQ(trace.entries.size(), sites.size());
    std::set<std::string> seen;
    for (const auto& entry : trace.entries) {
      EXPECT_EQ(entry.address.instance, 0u);
      seen.insert(entry.address.lexical_id);
    }
    EXPECT_EQ(seen, std::set<std::string>(sites.begin(), sites.end()));
  }
}

TEST(Generate, FixedSeedReproducesSeries) {
  const auto config = crossing_config(30, 2.0);
  RandomStream a(31), b(31);
  const auto x = std::get<GeneratedEvent>(generate_event(config, a));
  const auto y = std::get<GeneratedEvent>(generate_event(config, b));
  EXPECT_EQ(serialized(x.series), serialized(y.series));
  EXPECT_EQ(x.event.tca, y.event.tca);
}

TEST(Generate, TruthIgnoresSensorNoise) {
  auto config = crossing_config(40, 2.0);
  auto noisy = config;
  noisy.target_sensor = config.target_sensor.scaled(10.0);
  noisy.chaser_sensor = config.chaser_sensor.scaled(10.0);
  RandomStream a(41), b(41);
  const auto x = std::get<GeneratedEvent>(generate_event(config, a));
  const auto y = std::get<GeneratedEvent>(generate_event(noisy, b));
  EXPECT_EQ(x.event.tca, y.event.tca);
  EXPECT_EQ(x.event.miss_distance, y.event.miss_distance);
  EXPECT_EQ(x.event.target_state_at_tca.position, y.event.target_state_at_tca.position);
  EXPECT_EQ(x.event.chaser_state_at_tca.velocity, y.event.chaser_state_at_tca.velocity);
  EXPECT_NE(serialized(x.series), serialized(y.series));
}

TEST(Rejection, AlwaysConjunctionTakesOneAttempt) {
  RandomStream rng(50);
  const auto r = rejection_sample_conjunction(crossing_config(50, 1.0), rng, 10);
  EXPECT_EQ(r.attempts, 1u);
  EXPECT_EQ(r.failures, 0u);
}

TEST(Rejection, NeverConjunctionExhaustsCap) {
  RandomStream rng(51);
  try {
    rejection_sample_conjunction(never_config(), rng, 100, {false, 0});
    FAIL();
  } catch (const RejectionCapExceeded& e) {
    EXPECT_EQ(e.attempts(), 100u);
  }
  EXPECT_THROW(rejection_sample_conjunction(never_config(), rng, 0), std::invalid_argument);
}

TEST(Conditioning, RecordSelection) {
  auto config = crossing_config(60, 3.0);
  RandomStream rng(61);
  const auto series = std::get<GeneratedEvent>(generate_event(config, rng)).series;
  ASSERT_GE(series.records.size(), 2u);
  EXPECT_EQ(observation_set(series, Conditioning::first()).size(), 7u);
  EXPECT_EQ(observation_set(series, Conditioning::all()).size(), 7u * series.records.size());
  EXPECT_EQ(conditioned_records(series, Conditioning::record(1)), std::vector<std::size_t>{1});
  EXPECT_THROW(conditioned_records(series, Conditioning::record(series.records.size())), std::out_of_range);
  EXPECT_THROW(conditioned_records(cdm::CdmSeries{}, Conditioning::first()), std::out_of_range);
}

TEST(Inference, GroundTruthIsPlausibleUnderPosterior) {
  const auto config = crossing_config(70, 1.0, 1e-5);
  RandomStream rng(71);
  const auto truth = rejection_sample_conjunction(config, rng, 100);
  const auto posterior = infer_event(truth.event.series, config, 400, rng);
  EXPECT_GE(effective_sample_size(posterior), 1.0);
  for (const auto& site : latent_sites()) {
    const double x = *truth.trace.value(site);
    auto f = [&](const ppl::Trace& t) { return *t.value(site); };
    const double mean = ppl::posterior_expectation(posterior, f);
    const double var = ppl::posterior_expectation(posterior, [&](const ppl::Trace& t) {
      const double d = f(t) - mean;
      return d * d;
    });
    EXPECT_LE(std::abs(x - mean), 4.0 * std::sqrt(var) + 1e-12) << site;
  }
}

TEST(Inference, FlatLikelihoodReturnsPrior) {
  auto config = crossing_config(80, 1.0, 1e-6);
  RandomStream rng(81);
  const auto truth = rejection_sample_conjunction(config, rng, 100);
  config.likelihood_sigmas = config.likelihood_sigmas.scaled(1e6);
  const std::size_t n = 1000;
  const auto posterior = infer_event(truth.event.series, config, n, rng);
  EXPECT_GT(effective_sample_size(posterior), 0.99 * static_cast<double>(n));
  for (const char* site : {"target/raan", "chaser/mean_anomaly", "target/mean_motion"}) {
    const auto& prior = std::string(site).starts_with("target") ? config.prior : *config.chaser_prior;
    const auto e = population::element_from_name(std::string(site).substr(std::string(site).find('/') + 1));
    const auto s = dist::support(prior[e]);
    const auto h = ppl::posterior_marginal(posterior, site, 0, 10, s.lower, s.upper);
    for (double m : h.masses) EXPECT_NEAR(m, 0.1, 3.0 * std::sqrt(0.1 * 0.9 / n)) << site;
  }
}

TEST(Inference, NeverConjunctionIsDegenerate) {
  const auto good = crossing_config(90, 1.0);
  RandomStream rng(91);
  const auto truth = rejection_sample_conjunction(good, rng, 10);
  EXPECT_THROW(infer_event(truth.event.series, never_config(), 20, rng), DegeneratePosterior);
}

TEST(Calibration, LowerTriangleRoundTrip) {
  Mat6 c = Mat6::Random();
  c = c * c.transpose();
  EXPECT_EQ(from_lower_triangle(lower_triangle(c)), c);
  EXPECT_EQ(covariance_entry_names()[1], "C_T_R");
  EXPECT_EQ(covariance_entry_names()[20], "C_NDOT_NDOT");
}

TEST(Calibration, FixedPointAndClosure) {
  auto config = crossing_config(100, 2.0, 1e-4);
  CalibrationOptions options;
  options.events = 3;
  RandomStream ref_rng(101);
  const auto reference = simulate_covariances(config, ref_rng, 1.0, 1.0, options);
  ASSERT_FALSE(reference.empty());
  RandomStream rng(101);
  const auto fixed = calibrate_sensors(reference, config, rng, options);
  EXPECT_NEAR(fixed.target_scale, 1.0, 0.02);
  EXPECT_NEAR(fixed.chaser_scale, 1.0, 0.02);

  RandomStream ref2(101);
  const auto scaled = simulate_covariances(config, ref2, 2.0, 2.0, options);
  RandomStream rng2(101);
  const auto closure = calibrate_sensors(scaled, config, rng2, options);
  EXPECT_NEAR(closure.target_scale, 2.0, 0.1);
  EXPECT_NEAR(closure.chaser_scale, 2.0, 0.1);
  EXPECT_EQ(closure.target_sensor, config.target_sensor.scaled(closure.target_scale));
  EXPECT_EQ(closure.report.target.size(), kCovarianceEntries);
}

TEST(Calibration, DoublingNoiseAtLeastDoublesPositionVariance) {
  auto config = crossing_config(110, 2.0, 1e-4);
  CalibrationOptions options;
  options.events = 4;
  RandomStream a(111), b(111);
  const auto base = simulate_covariances(config, a, 1.0, 1.0, options);
  const auto doubled = simulate_covariances(config, b, 2.0, 2.0, options);
  ASSERT_EQ(base.size(), doubled.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    for (int d = 0; d < 3; ++d) ASSERT_GE(doubled[k].covariance(d, d), 2.0 * base[k].covariance(d, d));
  }
}

TEST(Calibration, EmptyReferenceIsRejected) {
  RandomStream rng(120);
  EXPECT_THROW(calibrate_sensors({}, crossing_config(120, 1.0), rng), std::invalid_argument);
}
