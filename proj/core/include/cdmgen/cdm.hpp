#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cdmgen/astro.hpp"
#include "cdmgen/conjunction.hpp"
#include "cdmgen/propagation.hpp"
#include "cdmgen/random.hpp"

namespace cdmgen::cdm {

/// Gaussian observation noise per RTN axis and the chance of a fresh observation at each issuing epoch.
struct SensorModel {
  Vec3 position_sigma_rtn = Vec3::Zero();  // km
  Vec3 velocity_sigma_rtn = Vec3::Zero();  // km/s
  double update_probability = 1.0;

  /// Copy with both sigma vectors multiplied by `factor`.
  SensorModel scaled(double factor) const;

  bool operator==(const SensorModel&) const = default;
};

SensorModel default_target_sensor();
SensorModel default_chaser_sensor();

/// Throws ConfigError for negative or non-finite sigmas or a probability outside [0, 1].
void validate(const SensorModel& sensor);

astro::StateVector observe_state(const astro::StateVector& truth, const SensorModel& sensor, RandomStream& rng);

inline constexpr std::size_t kMinMonteCarloSamples = 10;
inline constexpr std::size_t kDefaultMonteCarloSamples = 200;

struct PropagatedUncertainty {
  astro::StateVector mean_state;
  Mat6 covariance_rtn = Mat6::Zero();  // in the RTN frame of mean_state
  std::size_t attempts = 0;
};

/// Sample-based propagation of observation noise to `tca`. Each perturbed state is
/// converted to elements (with `bstar`) and propagated; draws that decay or fail to
/// convert are redrawn, up to 10 * n_samples attempts in total.
PropagatedUncertainty propagate_uncertainty_mc(const astro::StateVector& observed, const SensorModel& sensor,
                                               astro::Epoch tca, const prop::PropagatorSpec& spec,
                                               std::size_t n_samples, RandomStream& rng, double bstar = 0.0);

/// Symmetric part of `m`.
Mat6 symmetrized(const Mat6& m);

struct CollisionProbability {
  double probability = 0.0;
  bool regularized = false;  // projected covariance was singular and got a diagonal floor
};

inline constexpr double kCovarianceFloor = 1e-12;  // km^2
inline constexpr double kDefaultHardBodyRadius = 0.01;  // km
inline constexpr const char* kPcMethod = "ENCOUNTER_PLANE_2D";

/// Short-encounter probability: the relative-position Gaussian projected onto the
/// plane orthogonal to the relative velocity and integrated over a disc.
CollisionProbability collision_probability_2d(const Vec3& relative_position, const Vec3& relative_velocity,
                                              const Mat6& combined_covariance, double hard_body_radius);

struct ObjectReport {
  astro::StateVector state_at_tca;
  Mat6 covariance_rtn = Mat6::Zero();
  double observation_age = 0.0;  // s, creation epoch minus observation epoch
  bool freshly_observed = false;
};

struct CdmRecord {
  astro::Epoch creation_epoch;
  astro::Epoch tca_estimate;
  double miss_distance_estimate = 0.0;
  double relative_speed_estimate = 0.0;
  ObjectReport target;
  ObjectReport chaser;
  std::optional<double> collision_probability;
  std::string collision_probability_method;
};

struct CdmSeries {
  std::string event_id;
  std::optional<conjunction::ConjunctionEvent> ground_truth;
  std::vector<CdmRecord> records;
};

struct IssuingPolicy {
  double cadence_s = 8.0 * 3600.0;
  double lead_s = 7.0 * astro::constants::kSecondsPerDay;
  double jitter_s = 3600.0;
  std::size_t n_mc = kDefaultMonteCarloSamples;
  double hard_body_radius = kDefaultHardBodyRadius;
  double rescreen_half_width_s = 1800.0;
  double rescreen_step_s = conjunction::kDefaultStepS;
  /// Stop after this many records; the emitted prefix is identical to the full series.
  std::size_t max_records = static_cast<std::size_t>(-1);
};

/// Issuing epochs fall at TCA - lead + k * cadence plus uniform jitter and are kept
/// when they lie in [window start, TCA). Both objects are observed for the first
/// record; afterwards each is refreshed with its sensor's update probability.
CdmSeries issue_cdm_series(const conjunction::ConjunctionEvent& event, const SensorModel& target_sensor,
                           const SensorModel& chaser_sensor, const IssuingPolicy& policy,
                           const prop::PropagatorSpec& spec, RandomStream& rng);

/// Number of nominal issuing epochs strictly before TCA for the given lead and cadence.
std::size_t nominal_epoch_count(double lead_s, double cadence_s);

}  // namespace cdmgen::cdm
