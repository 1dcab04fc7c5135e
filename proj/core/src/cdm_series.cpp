#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "cdmgen/cdm.hpp"
#include "cdmgen/errors.hpp"

namespace cdmgen::cdm {

using astro::Epoch;
using astro::StateVector;

std::size_t nominal_epoch_count(double lead_s, double cadence_s) {
  if (!(cadence_s > 0.0)) throw std::invalid_argument("cadence must be positive");
  std::size_t k = 0;
  while (static_cast<double>(k) * cadence_s < lead_s) ++k;
  return k;
}

namespace {

// Last observation of one object plus the Monte Carlo stream tied to it, so a stale
// object's covariance is re-propagated from the same sample cloud.
struct LastObservation {
  StateVector state;
  RandomStream mc_stream{0};
};

Mat6 to_inertial(const PropagatedUncertainty& u) {
  const Mat6 rot = astro::rtn_frame6(astro::rtn_frame(u.mean_state));
  return rot.transpose() * u.covariance_rtn * rot;
}

void check_policy(const IssuingPolicy& p) {
  if (!(p.cadence_s > 0.0)) throw std::invalid_argument("cadence must be positive");
  if (!(p.lead_s >= 0.0 && p.lead_s <= 7.0 * astro::constants::kSecondsPerDay)) {
    throw std::invalid_argument("lead must lie in [0, 7 days]");
  }
  if (!(p.jitter_s >= 0.0)) throw std::invalid_argument("jitter must be non-negative");
  if (p.n_mc < kMinMonteCarloSamples) throw std::invalid_argument("n_mc must be at least 10");
  if (!(p.hard_body_radius >= 0.0)) throw std::invalid_argument("hard body radius must be non-negative");
  if (!(p.rescreen_step_s > 0.0) || !(p.rescreen_half_width_s > 0.0)) {
    throw std::invalid_argument("re-screening bracket and step must be positive");
  }
}

}  // namespace

CdmSeries issue_cdm_series(const conjunction::ConjunctionEvent& event, const SensorModel& target_sensor,
                           const SensorModel& chaser_sensor, const IssuingPolicy& policy,
                           const prop::PropagatorSpec& spec, RandomStream& rng) {
  check_policy(policy);
  validate(target_sensor);
  validate(chaser_sensor);
  if (!event.window.contains(event.tca)) throw std::invalid_argument("event TCA lies outside its window");

  const Epoch tca = event.tca;
  const auto& window = event.window;
  const double target_bstar = event.target_elements.bstar;
  const double chaser_bstar = event.chaser_elements.bstar;
  const conjunction::TimeWindow bracket{std::max(window.start, tca - policy.rescreen_half_width_s),
                                        std::min(window.end, tca + policy.rescreen_half_width_s)};

  RandomStream base = rng.fork();
  CdmSeries series;
  std::optional<LastObservation> target_obs, chaser_obs;

  const std::size_t n = nominal_epoch_count(policy.lead_s, policy.cadence_s);
  for (std::size_t k = 0; k < n && series.records.size() < policy.max_records; ++k) {
    RandomStream stream = base.derive(k);
    const double nominal = tca.seconds - policy.lead_s + static_cast<double>(k) * policy.cadence_s;
    const Epoch epoch(nominal + (2.0 * stream.uniform() - 1.0) * policy.jitter_s);
    if (epoch < window.start || epoch >= tca) continue;
    if (!series.records.empty() && epoch <= series.records.back().creation_epoch) continue;

    const bool first = series.records.empty();
    const bool target_fresh = stream.uniform() < target_sensor.update_probability || first;
    const bool chaser_fresh = stream.uniform() < chaser_sensor.update_probability || first;
    if (target_fresh) {
      const StateVector truth = prop::propagate(event.target_elements, epoch, spec);
      target_obs = LastObservation{observe_state(truth, target_sensor, stream), stream.fork()};
    }
    if (chaser_fresh) {
      const StateVector truth = prop::propagate(event.chaser_elements, epoch, spec);
      chaser_obs = LastObservation{observe_state(truth, chaser_sensor, stream), stream.fork()};
    }

    const auto target_traj =
        conjunction::make_trajectory(astro::state_to_elements(target_obs->state, target_bstar), spec);
    const auto chaser_traj =
        conjunction::make_trajectory(astro::state_to_elements(chaser_obs->state, chaser_bstar), spec);
    const auto estimate = conjunction::closest_approach_in(target_traj, chaser_traj, bracket, policy.rescreen_step_s);

    CdmRecord rec;
    rec.creation_epoch = epoch;
    rec.tca_estimate = estimate.tca;
    rec.target.state_at_tca = target_traj(estimate.tca);
    rec.chaser.state_at_tca = chaser_traj(estimate.tca);
    rec.miss_distance_estimate = conjunction::separation(rec.target.state_at_tca, rec.chaser.state_at_tca);
    rec.relative_speed_estimate = (rec.chaser.state_at_tca.velocity - rec.target.state_at_tca.velocity).norm();

    RandomStream target_mc = target_obs->mc_stream;
    RandomStream chaser_mc = chaser_obs->mc_stream;
    const auto target_unc = propagate_uncertainty_mc(target_obs->state, target_sensor, estimate.tca, spec,
                                                     policy.n_mc, target_mc, target_bstar);
    const auto chaser_unc = propagate_uncertainty_mc(chaser_obs->state, chaser_sensor, estimate.tca, spec,
                                                     policy.n_mc, chaser_mc, chaser_bstar);
    rec.target.covariance_rtn = target_unc.covariance_rtn;
    rec.chaser.covariance_rtn = chaser_unc.covariance_rtn;
    rec.target.observation_age = epoch - target_obs->state.epoch;
    rec.chaser.observation_age = epoch - chaser_obs->state.epoch;
    rec.target.freshly_observed = target_fresh;
    rec.chaser.freshly_observed = chaser_fresh;

    const Mat6 target_rot = astro::rtn_frame6(astro::rtn_frame(rec.target.state_at_tca));
    const Mat6 combined = symmetrized(target_rot * (to_inertial(target_unc) + to_inertial(chaser_unc)) *
                                      target_rot.transpose());
    const auto geometry = conjunction::relative_geometry(rec.target.state_at_tca, rec.chaser.state_at_tca);
    if (geometry.velocity_rtn.norm() > 0.0) {
      rec.collision_probability = collision_probability_2d(geometry.position_rtn, geometry.velocity_rtn, combined,
                                                           policy.hard_body_radius)
                                      .probability;
      rec.collision_probability_method = kPcMethod;
    }
    series.records.push_back(std::move(rec));
  }
  return series;
}

}  // namespace cdmgen::cdm
