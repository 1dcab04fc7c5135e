#include "cdmgen/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cdmgen/errors.hpp"

namespace cdmgen::scenario {

using astro::Epoch;
using population::Element;

LikelihoodSigmas LikelihoodSigmas::scaled(double factor) const {
  return {tca_s * factor, semi_major_axis_km * factor, eccentricity * factor, inclination_rad * factor};
}

conjunction::TimeWindow ScenarioConfig::window() const {
  return {Epoch(0.0), Epoch::from_days(window_days)};
}

cdm::IssuingPolicy ScenarioConfig::issuing_policy() const {
  cdm::IssuingPolicy p;
  p.cadence_s = cadence_s;
  p.lead_s = lead_s;
  p.jitter_s = jitter_s;
  p.n_mc = n_mc_covariance;
  p.hard_body_radius = hard_body_radius_km;
  return p;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void validate(const ScenarioConfig& c) {
  population::validate(c.prior);
  if (c.chaser_prior) population::validate(*c.chaser_prior);
  require(c.propagator.drag_decay_per_day >= 0.0 && std::isfinite(c.propagator.drag_decay_per_day),
          "propagator.drag_decay_per_day must be non-negative");
  require(std::isfinite(c.propagator.j2), "propagator.j2 must be finite");
  require(c.window_days > 0.0 && std::isfinite(c.window_days), "window_days must be positive");
  require(c.threshold_km > 0.0 && std::isfinite(c.threshold_km), "threshold_km must be positive");
  require(c.screening_step_s > 0.0 && std::isfinite(c.screening_step_s), "screening_step_s must be positive");
  cdm::validate(c.target_sensor);
  cdm::validate(c.chaser_sensor);
  require(c.cadence_s > 0.0 && std::isfinite(c.cadence_s), "cadence_s must be positive");
  require(c.jitter_s >= 0.0 && std::isfinite(c.jitter_s), "jitter_s must be non-negative");
  require(c.lead_s > 0.0 && c.lead_s <= 7.0 * astro::constants::kSecondsPerDay, "lead_s must lie in (0, 7 days]");
  require(c.lead_s <= c.window_days * astro::constants::kSecondsPerDay, "window must be at least as long as the lead");
  require(c.n_mc_covariance >= cdm::kMinMonteCarloSamples, "n_mc_covariance must be at least 10");
  require(c.hard_body_radius_km >= 0.0 && std::isfinite(c.hard_body_radius_km),
          "hard_body_radius_km must be non-negative");
  const auto& s = c.likelihood_sigmas;
  require(s.tca_s > 0.0 && s.semi_major_axis_km > 0.0 && s.eccentricity > 0.0 && s.inclination_rad > 0.0,
          "likelihood sigmas must be positive");
}

EventObservation extract_observation(const cdm::CdmRecord& record) {
  auto observables = [](const astro::StateVector& sv) {
    const auto el = astro::state_to_elements(sv);
    return ObjectObservables{el.semi_major_axis, el.eccentricity, el.inclination};
  };
  return {record.tca_estimate, observables(record.target.state_at_tca), observables(record.chaser.state_at_tca)};
}

namespace {

struct Term {
  std::string suffix;
  double observed;
  dist::Normal density;
};

// The seven likelihood terms, shared by likelihood() and the conditioned model.
std::vector<Term> terms(const EventObservation& sim, const LikelihoodSigmas& s) {
  auto object_terms = [&](std::vector<Term>& out, const char* object, const ObjectObservables& o) {
    const std::string prefix = std::string(object) + "/";
    out.push_back({prefix + "semi_major_axis", 0.0, dist::Normal{o.semi_major_axis, s.semi_major_axis_km, 0.0}});
    out.push_back({prefix + "eccentricity", 0.0, dist::Normal{o.eccentricity, s.eccentricity, 0.0}});
    out.push_back(
        {prefix + "inclination", 0.0, dist::Normal{o.inclination, s.inclination_rad, astro::constants::kTwoPi}});
  };
  std::vector<Term> out;
  out.push_back({"tca", 0.0, dist::Normal{sim.tca.seconds, s.tca_s, 0.0}});
  object_terms(out, "target", sim.target);
  object_terms(out, "chaser", sim.chaser);
  return out;
}

std::array<double, 7> values(const EventObservation& o) {
  return {o.tca.seconds,       o.target.semi_major_axis, o.target.eccentricity, o.target.inclination,
          o.chaser.semi_major_axis, o.chaser.eccentricity,  o.chaser.inclination};
}

std::string record_prefix(std::size_t k) { return "cdm" + std::to_string(k) + "/"; }

}  // namespace

double likelihood(const EventObservation& observed, const EventObservation& simulated, const LikelihoodSigmas& sigmas) {
  const auto t = terms(simulated, sigmas);
  const auto y = values(observed);
  double total = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) total += dist::log_density(t[k].density, y[k]);
  return total;
}

std::string site_name(std::string_view object, Element e) {
  return std::string(object) + "/" + std::string(population::element_name(e));
}

std::vector<std::string> latent_sites() {
  std::vector<std::string> out;
  for (const char* object : {"target", "chaser"}) {
    for (Element e : population::kAllElements) {
      if (e != Element::Bstar) out.push_back(site_name(object, e));
    }
  }
  out.push_back(site_name("target", Element::Bstar));
  out.push_back(site_name("chaser", Element::Bstar));
  return out;
}

GenerationOutcome generate_event(ppl::Context& ctx, const ScenarioConfig& config, const GenerateOptions& options) {
  auto sampler = [&ctx](const char* object) {
    return [&ctx, object](Element e, const dist::Distribution& d) { return ctx.sample(site_name(object, e), d); };
  };
  const auto target = population::draw_object(config.prior, Epoch(0.0), sampler("target"));
  const auto chaser = population::draw_object(config.chaser_population(), Epoch(0.0), sampler("chaser"));

  if (!population::is_physical(target)) return GenerationFailure{"target elements are not physical"};
  if (!population::is_physical(chaser)) return GenerationFailure{"chaser elements are not physical"};
  if (target == chaser) return GenerationFailure{"target and chaser elements are identical"};

  const auto window = config.window();
  std::vector<conjunction::ConjunctionEvent> events;
  try {
    events = conjunction::screen_pair(target, chaser, window, config.propagator, config.threshold_km,
                                      config.screening_step_s);
  } catch (const DecayError& e) {
    return GenerationFailure{e.what()};
  } catch (const NonUnimodalBracket& e) {
    return GenerationFailure{e.what()};
  }
  if (events.empty()) return NoConjunction{"no close approach below the threshold"};

  GeneratedEvent out;
  out.close_approaches = events.size();
  out.event = *std::min_element(events.begin(), events.end(),
                                [](const auto& a, const auto& b) { return a.miss_distance < b.miss_distance; });
  if (!options.issue_cdms) return out;

  cdm::IssuingPolicy policy = config.issuing_policy();
  policy.max_records = options.max_records;
  try {
    out.series = cdm::issue_cdm_series(out.event, config.target_sensor, config.chaser_sensor, policy,
                                       config.propagator, ctx.auxiliary());
  } catch (const Error& e) {
    return GenerationFailure{e.what()};
  }
  if (out.series.records.empty()) return NoConjunction{"no CDM issued between scenario start and TCA"};
  out.series.ground_truth = out.event;
  return out;
}

GenerationOutcome generate_event(const ScenarioConfig& config, RandomStream& rng, const GenerateOptions& options,
                                 ppl::Trace* trace) {
  GenerationOutcome outcome = NoConjunction{};
  ppl::Model model = [&](ppl::Context& ctx) { outcome = generate_event(ctx, config, options); };
  ppl::Trace t = ppl::run_model(model, ppl::Mode::Prior, nullptr, rng);
  if (trace != nullptr) *trace = std::move(t);
  return outcome;
}

RejectionResult rejection_sample_conjunction(const ScenarioConfig& config, RandomStream& rng,
                                             std::size_t max_attempts, const GenerateOptions& options) {
  if (max_attempts == 0) throw std::invalid_argument("max_attempts must be at least 1");
  const RandomStream base = rng.fork();
  RejectionResult result;
  for (std::size_t i = 0; i < max_attempts; ++i) {
    GenerationOutcome outcome = NoConjunction{};
    ppl::Model model = [&](ppl::Context& ctx) { outcome = generate_event(ctx, config, options); };
    ppl::Trace trace = ppl::run_model_on(model, ppl::Mode::Prior, nullptr, base.derive(i));
    result.attempts = i + 1;
    if (auto* ev = std::get_if<GeneratedEvent>(&outcome)) {
      result.event = std::move(*ev);
      result.trace = std::move(trace);
      return result;
    }
    if (std::holds_alternative<GenerationFailure>(outcome)) ++result.failures;
  }
  throw RejectionCapExceeded("no conjunction generated", result.attempts);
}

std::vector<std::size_t> conditioned_records(const cdm::CdmSeries& series, Conditioning conditioning) {
  const std::size_t n = series.records.size();
  if (n == 0) throw std::out_of_range("CDM series is empty");
  switch (conditioning.kind) {
    case Conditioning::Kind::First:
      return {0};
    case Conditioning::Kind::Index:
      if (conditioning.index >= n) {
        throw std::out_of_range("record index " + std::to_string(conditioning.index) + " outside series of " +
                                std::to_string(n));
      }
      return {conditioning.index};
    case Conditioning::Kind::All: {
      std::vector<std::size_t> all(n);
      for (std::size_t k = 0; k < n; ++k) all[k] = k;
      return all;
    }
  }
  return {0};
}

ppl::ObservationSet observation_set(const cdm::CdmSeries& series, Conditioning conditioning) {
  ppl::ObservationSet out;
  for (std::size_t k : conditioned_records(series, conditioning)) {
    const auto obs = extract_observation(series.records[k]);
    const auto t = terms(obs, LikelihoodSigmas{});
    const auto y = values(obs);
    for (std::size_t j = 0; j < t.size(); ++j) out.emplace(record_prefix(k) + t[j].suffix, y[j]);
  }
  return out;
}

ppl::Model conditioned_model(const ScenarioConfig& config, std::vector<std::size_t> records) {
  if (records.empty()) throw std::invalid_argument("conditioned_model needs at least one record");
  const std::size_t needed = *std::max_element(records.begin(), records.end()) + 1;
  return [config, records = std::move(records), needed](ppl::Context& ctx) {
    const GenerationOutcome outcome = generate_event(ctx, config, GenerateOptions{true, needed});
    if (const auto* none = std::get_if<NoConjunction>(&outcome)) return ctx.reject(none->reason);
    if (const auto* fail = std::get_if<GenerationFailure>(&outcome)) return ctx.reject(fail->reason);
    const auto& series = std::get<GeneratedEvent>(outcome).series;
    if (series.records.size() < needed) return ctx.reject("simulated series has too few records");
    for (std::size_t k : records) {
      for (const auto& term : terms(extract_observation(series.records[k]), config.likelihood_sigmas)) {
        ctx.observe(record_prefix(k) + term.suffix, term.density);
      }
    }
  };
}

ppl::WeightedPosterior infer_event(const cdm::CdmSeries& observed, const ScenarioConfig& config,
                                   std::size_t n_samples, RandomStream& rng, Conditioning conditioning,
                                   std::size_t workers) {
  validate(config);
  const auto records = conditioned_records(observed, conditioning);
  const auto obs = observation_set(observed, conditioning);
  return ppl::importance_sample(conditioned_model(config, records), obs, n_samples, rng, workers);
}

}  // namespace cdmgen::scenario
