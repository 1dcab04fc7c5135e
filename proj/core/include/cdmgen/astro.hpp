#pragma once

#include <Eigen/Core>
#include <compare>
#include <numbers>

namespace cdmgen {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

}  // namespace cdmgen

namespace cdmgen::astro {

namespace constants {
inline constexpr double kMu = 398600.4418;            // km^3/s^2
inline constexpr double kEarthRadius = 6378.137;      // km, equatorial
inline constexpr double kJ2 = 1.08262668e-3;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}  // namespace constants

/// Seconds relative to the scenario reference instant (t = 0 at scenario start).
struct Epoch {
  double seconds = 0.0;

  constexpr Epoch() = default;
  constexpr explicit Epoch(double s) : seconds(s) {}

  static constexpr Epoch from_days(double days) { return Epoch(days * constants::kSecondsPerDay); }
  constexpr double days() const { return seconds / constants::kSecondsPerDay; }

  constexpr auto operator<=>(const Epoch&) const = default;

  constexpr Epoch operator+(double dt) const { return Epoch(seconds + dt); }
  constexpr Epoch operator-(double dt) const { return Epoch(seconds - dt); }
  constexpr double operator-(Epoch other) const { return seconds - other.seconds; }
};

/// Keplerian elements of one object. Angles in radians, semi-major axis in km.
struct OrbitalElements {
  double semi_major_axis = 0.0;
  double eccentricity = 0.0;
  double inclination = 0.0;
  double raan = 0.0;
  double arg_perigee = 0.0;
  double mean_anomaly = 0.0;
  Epoch epoch{};
  double bstar = 0.0;  // 1/earth-radii

  /// Mean motion in rad/s.
  double mean_motion() const;
  double mean_motion_rev_per_day() const;
  double period() const;
  double perigee_radius() const { return semi_major_axis * (1.0 - eccentricity); }
  double apogee_radius() const { return semi_major_axis * (1.0 + eccentricity); }

  bool operator==(const OrbitalElements&) const = default;
};

double semi_major_axis_from_mean_motion(double rad_per_s);
double semi_major_axis_from_rev_per_day(double rev_per_day);
double rev_per_day_to_rad_per_s(double rev_per_day);
double rad_per_s_to_rev_per_day(double rad_per_s);

/// Throws InvalidElements unless a > Earth radius, 0 <= e < 1, i in [0, pi] and all fields finite.
void validate(const OrbitalElements& el);

/// Copy with raan, arg_perigee and mean_anomaly folded into [0, 2pi).
OrbitalElements normalized(OrbitalElements el);

/// Inertial position (km) and velocity (km/s) at an epoch.
struct StateVector {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Epoch epoch{};

  Vec6 as_vector() const {
    Vec6 out;
    out << position, velocity;
    return out;
  }
  static StateVector from_vector(const Vec6& v, Epoch epoch) {
    return {v.head<3>(), v.tail<3>(), epoch};
  }
};

/// Angle folded into [0, 2pi).
double wrap_two_pi(double angle);
/// Angle folded into (-pi, pi].
double wrap_pi(double angle);
/// Shortest distance between two angles on the circle, in [0, pi].
double circular_distance(double a, double b);

/// Solves E - e sin E = M by Newton iteration with a bisection fallback.
/// The result lies on the same 2pi branch as M.
double solve_kepler(double mean_anomaly, double eccentricity);

StateVector elements_to_state(const OrbitalElements& el);

/// Osculating elements of a bound state. For e < 1e-11 the argument of perigee is
/// set to zero and folded into the mean anomaly; for equatorial orbits the node is
/// set to zero and folded into the argument of perigee.
OrbitalElements state_to_elements(const StateVector& sv, double bstar = 0.0);

double specific_energy(const StateVector& sv);

/// Rows are the radial, transverse and normal unit vectors of the state.
Mat3 rtn_frame(const StateVector& sv);

/// Block-diagonal 6x6 rotation applying `rtn` to position and velocity.
Mat6 rtn_frame6(const Mat3& rtn);

}  // namespace cdmgen::astro
