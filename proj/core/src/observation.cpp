#include <cmath>
#include <stdexcept>

#include "cdmgen/cdm.hpp"
#include "cdmgen/errors.hpp"

namespace cdmgen::cdm {

SensorModel SensorModel::scaled(double factor) const {
  SensorModel out = *this;
  out.position_sigma_rtn *= factor;
  out.velocity_sigma_rtn *= factor;
  return out;
}

SensorModel default_target_sensor() {
  return {Vec3(0.01, 0.04, 0.01), Vec3(1e-5, 4e-5, 1e-5), 1.0};
}

SensorModel default_chaser_sensor() {
  return {Vec3(0.1, 1.0, 0.3), Vec3(1e-4, 1e-3, 3e-4), 0.6};
}

void validate(const SensorModel& sensor) {
  for (int k = 0; k < 3; ++k) {
    const double p = sensor.position_sigma_rtn[k];
    const double v = sensor.velocity_sigma_rtn[k];
    if (!std::isfinite(p) || p < 0.0 || !std::isfinite(v) || v < 0.0) {
      throw ConfigError("sensor sigmas must be finite and non-negative");
    }
  }
  if (!(sensor.update_probability >= 0.0 && sensor.update_probability <= 1.0)) {
    throw ConfigError("sensor update_probability must lie in [0, 1]");
  }
}

astro::StateVector observe_state(const astro::StateVector& truth, const SensorModel& sensor, RandomStream& rng) {
  const Mat3 rtn = astro::rtn_frame(truth);
  Vec3 dp, dv;
  for (int k = 0; k < 3; ++k) dp[k] = sensor.position_sigma_rtn[k] * rng.normal();
  for (int k = 0; k < 3; ++k) dv[k] = sensor.velocity_sigma_rtn[k] * rng.normal();
  astro::StateVector out = truth;
  out.position += rtn.transpose() * dp;
  out.velocity += rtn.transpose() * dv;
  return out;
}

Mat6 symmetrized(const Mat6& m) { return 0.5 * (m + m.transpose()); }

PropagatedUncertainty propagate_uncertainty_mc(const astro::StateVector& observed, const SensorModel& sensor,
                                               astro::Epoch tca, const prop::PropagatorSpec& spec,
                                               std::size_t n_samples, RandomStream& rng, double bstar) {
  if (n_samples < kMinMonteCarloSamples) {
    throw std::invalid_argument("propagate_uncertainty_mc: need at least 10 samples");
  }
  RandomStream base = rng.fork();
  const std::size_t cap = 10 * n_samples;
  std::size_t attempts = 0;

  std::vector<Vec6> cloud;
  cloud.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    RandomStream stream = base.derive(i);
    while (true) {
      if (attempts >= cap) {
        throw RejectionCapExceeded("Monte Carlo covariance propagation", attempts);
      }
      ++attempts;
      const astro::StateVector perturbed = observe_state(observed, sensor, stream);
      try {
        const astro::OrbitalElements el = astro::state_to_elements(perturbed, bstar);
        cloud.push_back(prop::propagate(el, tca, spec).as_vector());
        break;
      } catch (const DecayError&) {
      } catch (const ConversionError&) {
      } catch (const InvalidElements&) {
      }
    }
  }

  // Deviations are taken from the first draw so identical draws give an exactly zero covariance.
  const Vec6 shift = cloud.front();
  Vec6 offset = Vec6::Zero();
  for (const Vec6& x : cloud) offset += x - shift;
  offset /= static_cast<double>(n_samples);
  const Vec6 mean = shift + offset;

  PropagatedUncertainty out;
  out.mean_state = astro::StateVector::from_vector(mean, tca);
  out.attempts = attempts;

  const Mat6 rot = astro::rtn_frame6(astro::rtn_frame(out.mean_state));
  Mat6 cov = Mat6::Zero();
  for (const Vec6& x : cloud) {
    const Vec6 d = rot * ((x - shift) - offset);
    cov.noalias() += d * d.transpose();
  }
  out.covariance_rtn = symmetrized(cov / static_cast<double>(n_samples - 1));
  return out;
}

}  // namespace cdmgen::cdm
