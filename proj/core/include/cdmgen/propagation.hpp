#pragma once

#include <vector>

#include "cdmgen/astro.hpp"

namespace cdmgen::prop {

enum class PropagatorKind { TwoBody, TwoBodyJ2, TwoBodyJ2Drag };

/// Analytic propagator configuration: Keplerian motion, optional first-order J2
/// secular rates, optional linear semi-major-axis decay scaled by bstar.
struct PropagatorSpec {
  PropagatorKind kind = PropagatorKind::TwoBodyJ2Drag;
  /// Semi-major-axis decay in km/day at bstar = 1e-4; scales linearly with bstar.
  double drag_decay_per_day = 0.05;
  double j2 = astro::constants::kJ2;

  bool operator==(const PropagatorSpec&) const = default;
};

inline constexpr double kReferenceBstar = 1e-4;

/// Semi-major-axis decay rate in km/s for an object with the given bstar.
double decay_rate(const PropagatorSpec& spec, double bstar);

/// Secular element rates (rad/s) for the J2 model at the given elements.
struct SecularRates {
  double raan;
  double arg_perigee;
  double mean_anomaly;  // J2 correction only; excludes the Keplerian mean motion
};
SecularRates j2_secular_rates(double semi_major_axis, double eccentricity, double inclination, double j2);

/// Mean elements at `to`. Throws DecayError if the semi-major axis reaches the Earth radius.
astro::OrbitalElements propagate_elements(const astro::OrbitalElements& el, astro::Epoch to,
                                          const PropagatorSpec& spec);

astro::StateVector propagate(const astro::OrbitalElements& el, astro::Epoch to, const PropagatorSpec& spec);

/// States at start + k*step for k = 0 .. floor((end-start)/step).
std::vector<astro::StateVector> propagate_ephemeris(const astro::OrbitalElements& el, astro::Epoch start,
                                                    astro::Epoch end, double step,
                                                    const PropagatorSpec& spec);

std::size_t ephemeris_length(astro::Epoch start, astro::Epoch end, double step);

/// Semi-major-axis range reached over [start, end].
struct SemiMajorAxisRange {
  double min;
  double max;
};
SemiMajorAxisRange semi_major_axis_range(const astro::OrbitalElements& el, astro::Epoch start, astro::Epoch end,
                                         const PropagatorSpec& spec);

}  // namespace cdmgen::prop
