#include "cdmgen/propagation.hpp"

#include <cmath>
#include <stdexcept>

#include "cdmgen/errors.hpp"

namespace cdmgen::prop {

using namespace astro::constants;

namespace {

bool has_j2(const PropagatorSpec& spec) { return spec.kind != PropagatorKind::TwoBody && spec.j2 != 0.0; }

// Integral of a(s)^(-p) over [0, dt] for a(s) = a0 - k s, written so that k -> 0
// is smooth: dt * a0^-p * expm1((1-p) log1p(-x)) / ((p-1) x) with x = k dt / a0.
double decay_integral(double a0, double k, double dt, double p) {
  const double base = dt * std::pow(a0, -p);
  const double x = k * dt / a0;
  if (x == 0.0) return base;
  return base * std::expm1((1.0 - p) * std::log1p(-x)) / ((p - 1.0) * x);
}

}  // namespace

double decay_rate(const PropagatorSpec& spec, double bstar) {
  if (spec.kind != PropagatorKind::TwoBodyJ2Drag) return 0.0;
  return (bstar / kReferenceBstar) * spec.drag_decay_per_day / kSecondsPerDay;
}

SecularRates j2_secular_rates(double a, double e, double i, double j2) {
  const double n = std::sqrt(kMu / (a * a * a));
  const double p = a * (1.0 - e * e);
  const double factor = j2 * (kEarthRadius / p) * (kEarthRadius / p) * n;
  const double c = std::cos(i);
  return {
      -1.5 * factor * c,
      0.75 * factor * (5.0 * c * c - 1.0),
      0.75 * factor * std::sqrt(1.0 - e * e) * (3.0 * c * c - 1.0),
  };
}

astro::OrbitalElements propagate_elements(const astro::OrbitalElements& el, astro::Epoch to,
                                          const PropagatorSpec& spec) {
  if (spec.drag_decay_per_day < 0.0) throw std::invalid_argument("drag_decay_per_day must be non-negative");
  const double dt = to - el.epoch;
  const double k = decay_rate(spec, el.bstar);
  const double a0 = el.semi_major_axis;

  astro::OrbitalElements out = el;
  out.epoch = to;

  if (k == 0.0) {
    out.mean_anomaly = el.mean_anomaly + el.mean_motion() * dt;
    if (has_j2(spec)) {
      const auto rates = j2_secular_rates(a0, el.eccentricity, el.inclination, spec.j2);
      out.raan = el.raan + rates.raan * dt;
      out.arg_perigee = el.arg_perigee + rates.arg_perigee * dt;
      out.mean_anomaly += rates.mean_anomaly * dt;
    }
    return out;
  }

  const double a = a0 - k * dt;
  if (!(a > kEarthRadius)) throw DecayError(to.seconds);
  out.semi_major_axis = a;
  out.mean_anomaly = el.mean_anomaly + std::sqrt(kMu) * decay_integral(a0, k, dt, 1.5);
  if (has_j2(spec)) {
    // every J2 rate scales as a^(-7/2) at fixed e and i
    const auto rates = j2_secular_rates(a0, el.eccentricity, el.inclination, spec.j2);
    const double scaled = decay_integral(a0, k, dt, 3.5) * std::pow(a0, 3.5);
    out.raan = el.raan + rates.raan * scaled;
    out.arg_perigee = el.arg_perigee + rates.arg_perigee * scaled;
    out.mean_anomaly += rates.mean_anomaly * scaled;
  }
  return out;
}

astro::StateVector propagate(const astro::OrbitalElements& el, astro::Epoch to, const PropagatorSpec& spec) {
  return astro::elements_to_state(propagate_elements(el, to, spec));
}

std::size_t ephemeris_length(astro::Epoch start, astro::Epoch end, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("ephemeris step must be positive");
  if (end < start) throw std::invalid_argument("ephemeris end precedes start");
  return static_cast<std::size_t>(std::floor((end - start) / step)) + 1;
}

std::vector<astro::StateVector> propagate_ephemeris(const astro::OrbitalElements& el, astro::Epoch start,
                                                    astro::Epoch end, double step,
                                                    const PropagatorSpec& spec) {
  const std::size_t n = ephemeris_length(start, end, step);
  std::vector<astro::StateVector> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(propagate(el, start + static_cast<double>(k) * step, spec));
  }
  return out;
}

SemiMajorAxisRange semi_major_axis_range(const astro::OrbitalElements& el, astro::Epoch start, astro::Epoch end,
                                         const PropagatorSpec& spec) {
  const double k = decay_rate(spec, el.bstar);
  const double a_start = el.semi_major_axis - k * (start - el.epoch);
  const double a_end = el.semi_major_axis - k * (end - el.epoch);
  return {std::min(a_start, a_end), std::max(a_start, a_end)};
}

}  // namespace cdmgen::prop
