#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cdmgen/cdm.hpp"
#include "cdmgen/conjunction.hpp"
#include "cdmgen/population.hpp"
#include "cdmgen/ppl.hpp"
#include "cdmgen/propagation.hpp"

namespace cdmgen::scenario {

/// Standard deviations of the Gaussian likelihood terms.
struct LikelihoodSigmas {
  double tca_s = 60.0;
  double semi_major_axis_km = 5.0;
  double eccentricity = 1e-3;
  double inclination_rad = 0.5 * astro::constants::kDegToRad;

  LikelihoodSigmas scaled(double factor) const;
  bool operator==(const LikelihoodSigmas&) const = default;
};

struct ScenarioConfig {
  population::PopulationPrior prior = population::default_prior();
  /// Separate chaser prior; the target prior is used when absent.
  std::optional<population::PopulationPrior> chaser_prior;
  prop::PropagatorSpec propagator;
  double window_days = 7.0;
  double threshold_km = conjunction::kDefaultThresholdKm;
  double screening_step_s = conjunction::kDefaultStepS;
  cdm::SensorModel target_sensor = cdm::default_target_sensor();
  cdm::SensorModel chaser_sensor = cdm::default_chaser_sensor();
  double cadence_s = 8.0 * 3600.0;
  double jitter_s = 3600.0;
  double lead_s = 7.0 * astro::constants::kSecondsPerDay;
  std::size_t n_mc_covariance = cdm::kDefaultMonteCarloSamples;
  double hard_body_radius_km = cdm::kDefaultHardBodyRadius;
  LikelihoodSigmas likelihood_sigmas;

  const population::PopulationPrior& chaser_population() const { return chaser_prior ? *chaser_prior : prior; }
  conjunction::TimeWindow window() const;
  cdm::IssuingPolicy issuing_policy() const;
};

/// Throws ConfigError on invalid values.
void validate(const ScenarioConfig& config);

struct ObjectObservables {
  double semi_major_axis = 0.0;  // km
  double eccentricity = 0.0;
  double inclination = 0.0;  // rad
};

struct EventObservation {
  astro::Epoch tca;
  ObjectObservables target;
  ObjectObservables chaser;
};

EventObservation extract_observation(const cdm::CdmRecord& record);

/// Sum of the seven Gaussian log-densities centred on `simulated`; inclination uses circular distance.
double likelihood(const EventObservation& observed, const EventObservation& simulated, const LikelihoodSigmas& sigmas);

struct GeneratedEvent {
  conjunction::ConjunctionEvent event;
  cdm::CdmSeries series;
  std::size_t close_approaches = 0;  // minima below threshold before keeping the deepest
};

struct NoConjunction {
  std::string reason;
};

struct GenerationFailure {
  std::string reason;
};

using GenerationOutcome = std::variant<GeneratedEvent, NoConjunction, GenerationFailure>;

struct GenerateOptions {
  bool issue_cdms = true;
  std::size_t max_records = static_cast<std::size_t>(-1);
};

/// Site name of one latent element, e.g. "target/inclination".
std::string site_name(std::string_view object, population::Element e);
/// The twelve six-element sites followed by the two bstar sites.
std::vector<std::string> latent_sites();

/// The generative program body. Samples both objects at the sites returned by
/// latent_sites(), screens the pair, keeps the deepest close approach and issues
/// the CDM series from the context's auxiliary stream.
GenerationOutcome generate_event(ppl::Context& ctx, const ScenarioConfig& config, const GenerateOptions& options = {});

/// Forward run in prior mode.
GenerationOutcome generate_event(const ScenarioConfig& config, RandomStream& rng, const GenerateOptions& options = {},
                                 ppl::Trace* trace = nullptr);

struct RejectionResult {
  GeneratedEvent event;
  std::size_t attempts = 0;
  std::size_t failures = 0;  // attempts ending in GenerationFailure
  ppl::Trace trace;
};

/// Attempt i runs on sub-stream i of `rng.fork()`. Throws RejectionCapExceeded.
RejectionResult rejection_sample_conjunction(const ScenarioConfig& config, RandomStream& rng,
                                             std::size_t max_attempts, const GenerateOptions& options = {});

struct Conditioning {
  enum class Kind { First, Index, All };
  Kind kind = Kind::First;
  std::size_t index = 0;

  static Conditioning first() { return {}; }
  static Conditioning record(std::size_t k) { return {Kind::Index, k}; }
  static Conditioning all() { return {Kind::All, 0}; }
};

/// Indices of the records used for conditioning. Throws std::out_of_range.
std::vector<std::size_t> conditioned_records(const cdm::CdmSeries& series, Conditioning conditioning);

ppl::ObservationSet observation_set(const cdm::CdmSeries& series, Conditioning conditioning);

/// Model scoring the simulated records at `records` against the named observations.
ppl::Model conditioned_model(const ScenarioConfig& config, std::vector<std::size_t> records);

ppl::WeightedPosterior infer_event(const cdm::CdmSeries& observed, const ScenarioConfig& config,
                                   std::size_t n_samples, RandomStream& rng,
                                   Conditioning conditioning = Conditioning::first(), std::size_t workers = 1);

// ---- calibration ----

inline constexpr std::size_t kCovarianceEntries = 21;

/// Lower-triangular RTN covariance entries in row order (C_R_R, C_T_R, C_T_T, ...).
std::array<double, kCovarianceEntries> lower_triangle(const Mat6& c);
Mat6 from_lower_triangle(const std::array<double, kCovarianceEntries>& entries);
/// Column names matching lower_triangle(), e.g. "C_T_R".
const std::array<std::string, kCovarianceEntries>& covariance_entry_names();

enum class ObjectRole { Target, Chaser };

struct ReferenceCovariance {
  ObjectRole object = ObjectRole::Target;
  Mat6 covariance = Mat6::Zero();
};

struct CalibrationOptions {
  std::size_t events = 12;
  std::size_t max_attempts_per_event = 2'000'000;
  double min_scale = 1e-3;
  double max_scale = 1e3;
  double objective_tolerance = 1e-3;
  double log_bracket_tolerance = 1e-2;
  std::size_t max_rounds = 20;
};

struct EntryQuantiles {
  std::string entry;
  std::array<double, 5> simulated;  // 5, 25, 50, 75, 95 %
  std::array<double, 5> reference;
};

struct CalibrationReport {
  std::vector<EntryQuantiles> target;
  std::vector<EntryQuantiles> chaser;
};

struct CalibrationResult {
  double target_scale = 1.0;
  double chaser_scale = 1.0;
  cdm::SensorModel target_sensor;
  cdm::SensorModel chaser_sensor;
  double initial_objective = 0.0;
  double objective = 0.0;
  std::size_t evaluations = 0;
  bool warning = false;
  std::string warning_text;
  CalibrationReport report;
};

/// Simulated TCA covariances of both objects over a fixed set of events, with the
/// sensor sigmas multiplied by the given scales. The events and noise streams are
/// derived from `rng` alone, so equal seeds reproduce equal sets.
std::vector<ReferenceCovariance> simulate_covariances(const ScenarioConfig& config, RandomStream& rng,
                                                      double target_scale, double chaser_scale,
                                                      const CalibrationOptions& options = {});

/// Coordinate-wise bisection on a log noise scale per object, minimising the sum over
/// the six diagonal entries of |log(median simulated / median reference)|.
CalibrationResult calibrate_sensors(const std::vector<ReferenceCovariance>& reference, const ScenarioConfig& config,
                                    RandomStream& rng, const CalibrationOptions& options = {});

}  // namespace cdmgen::scenario
