#include "cdmgen/astro.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

#include "cdmgen/errors.hpp"

namespace cdmgen::astro {

using namespace constants;

namespace {

constexpr double kDegenerateTolerance = 1e-11;
constexpr int kNewtonIterations = 50;

// Angle from `from` to `to` measured positively about `axis` (all unit vectors).
double angle_about(const Vec3& from, const Vec3& to, const Vec3& axis) {
  return std::atan2(axis.dot(from.cross(to)), from.dot(to));
}

}  // namespace

double OrbitalElements::mean_motion() const {
  return std::sqrt(kMu / (semi_major_axis * semi_major_axis * semi_major_axis));
}

double OrbitalElements::mean_motion_rev_per_day() const {
  return rad_per_s_to_rev_per_day(mean_motion());
}

double OrbitalElements::period() const { return kTwoPi / mean_motion(); }

double semi_major_axis_from_mean_motion(double rad_per_s) {
  return std::cbrt(kMu / (rad_per_s * rad_per_s));
}

double semi_major_axis_from_rev_per_day(double rev_per_day) {
  return semi_major_axis_from_mean_motion(rev_per_day_to_rad_per_s(rev_per_day));
}

double rev_per_day_to_rad_per_s(double rev_per_day) { return rev_per_day * kTwoPi / kSecondsPerDay; }

double rad_per_s_to_rev_per_day(double rad_per_s) { return rad_per_s * kSecondsPerDay / kTwoPi; }

void validate(const OrbitalElements& el) {
  const double fields[] = {el.semi_major_axis, el.eccentricity, el.inclination, el.raan,
                           el.arg_perigee,     el.mean_anomaly, el.epoch.seconds, el.bstar};
  for (double f : fields) {
    if (!std::isfinite(f)) throw InvalidElements("orbital elements contain a non-finite field");
  }
  if (el.semi_major_axis <= kEarthRadius) {
    throw InvalidElements("semi-major axis " + std::to_string(el.semi_major_axis) +
                          " km is not above the Earth radius");
  }
  if (el.eccentricity < 0.0 || el.eccentricity >= 1.0) {
    throw InvalidElements("eccentricity " + std::to_string(el.eccentricity) + " outside [0, 1)");
  }
  if (el.inclination < 0.0 || el.inclination > kPi) {
    throw InvalidElements("inclination " + std::to_string(el.inclination) + " rad outside [0, pi]");
  }
}

OrbitalElements normalized(OrbitalElements el) {
  el.raan = wrap_two_pi(el.raan);
  el.arg_perigee = wrap_two_pi(el.arg_perigee);
  el.mean_anomaly = wrap_two_pi(el.mean_anomaly);
  return el;
}

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_pi(double angle) {
  double r = wrap_two_pi(angle);
  if (r > kPi) r -= kTwoPi;
  return r;
}

double circular_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

double solve_kepler(double mean_anomaly, double eccentricity) {
  if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
    throw std::invalid_argument("solve_kepler: eccentricity must lie in [0, 1)");
  }
  if (!std::isfinite(mean_anomaly)) throw std::invalid_argument("solve_kepler: non-finite mean anomaly");

  const double branch = std::floor(mean_anomaly / kTwoPi);
  const double m = mean_anomaly - branch * kTwoPi;
  const double e = eccentricity;
  if (e == 0.0) return mean_anomaly;

  auto residual = [&](double E) { return E - e * std::sin(E) - m; };

  double E = e > 0.8 ? kPi : m;
  bool converged = false;
  for (int iter = 0; iter < kNewtonIterations; ++iter) {
    const double f = residual(E);
    const double step = f / (1.0 - e * std::cos(E));
    E -= step;
    if (std::abs(step) < 1e-15 || f == 0.0) {
      converged = true;
      break;
    }
  }

  if (!converged || !(E >= 0.0 && E <= kTwoPi) || std::abs(residual(E)) > 1e-13) {
    // residual is strictly increasing in E with residual(0) <= 0 <= residual(2pi)
    double lo = 0.0;
    double hi = kTwoPi;
    for (int iter = 0; iter < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon(); ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (residual(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    E = 0.5 * (lo + hi);
    if (std::abs(residual(E)) > 1e-12) throw std::runtime_error("solve_kepler: no convergence");
  }
  return E + branch * kTwoPi;
}

StateVector elements_to_state(const OrbitalElements& el) {
  const double a = el.semi_major_axis;
  const double e = el.eccentricity;
  const double E = solve_kepler(el.mean_anomaly, e);
  const double cos_E = std::cos(E);
  const double sin_E = std::sin(E);
  const double root = std::sqrt(1.0 - e * e);

  const double r = a * (1.0 - e * cos_E);
  const double x_pf = a * (cos_E - e);
  const double y_pf = a * root * sin_E;
  const double scale = std::sqrt(kMu * a) / r;
  const double vx_pf = -scale * sin_E;
  const double vy_pf = scale * root * cos_E;

  const double cO = std::cos(el.raan), sO = std::sin(el.raan);
  const double cw = std::cos(el.arg_perigee), sw = std::sin(el.arg_perigee);
  const double ci = std::cos(el.inclination), si = std::sin(el.inclination);

  const Vec3 p(cO * cw - sO * sw * ci, sO * cw + cO * sw * ci, sw * si);
  const Vec3 q(-cO * sw - sO * cw * ci, -sO * sw + cO * cw * ci, cw * si);

  StateVector sv;
  sv.position = x_pf * p + y_pf * q;
  sv.velocity = vx_pf * p + vy_pf * q;
  sv.epoch = el.epoch;
  return sv;
}

double specific_energy(const StateVector& sv) {
  return 0.5 * sv.velocity.squaredNorm() - kMu / sv.position.norm();
}

OrbitalElements state_to_elements(const StateVector& sv, double bstar) {
  const Vec3& r_vec = sv.position;
  const Vec3& v_vec = sv.velocity;
  const double r = r_vec.norm();
  if (!(r > 0.0) || !r_vec.allFinite() || !v_vec.allFinite()) {
    throw ConversionError("state_to_elements: position must be finite and non-zero");
  }
  const double energy = specific_energy(sv);
  if (!(energy < 0.0)) throw ConversionError("state_to_elements: state is not bound");

  const Vec3 h_vec = r_vec.cross(v_vec);
  const double h = h_vec.norm();
  if (!(h > 1e-12 * r * v_vec.norm()) || h == 0.0) {
    throw ConversionError("state_to_elements: rectilinear state");
  }
  const Vec3 h_hat = h_vec / h;

  OrbitalElements el;
  el.epoch = sv.epoch;
  el.bstar = bstar;
  el.semi_major_axis = -kMu / (2.0 * energy);

  const Vec3 e_vec = v_vec.cross(h_vec) / kMu - r_vec / r;
  const double e = e_vec.norm();
  el.inclination = std::atan2(std::hypot(h_hat.x(), h_hat.y()), h_hat.z());

  const Vec3 node = Vec3::UnitZ().cross(h_hat);
  const double node_norm = node.norm();
  Vec3 node_hat = Vec3::UnitX();
  if (node_norm >= kDegenerateTolerance) {
    node_hat = node / node_norm;
    el.raan = wrap_two_pi(std::atan2(node_hat.y(), node_hat.x()));
  }

  const Vec3 r_hat = r_vec / r;
  double true_anomaly;
  if (e >= kDegenerateTolerance) {
    el.eccentricity = e;
    const Vec3 e_hat = e_vec / e;
    el.arg_perigee = wrap_two_pi(angle_about(node_hat, e_hat, h_hat));
    true_anomaly = angle_about(e_hat, r_hat, h_hat);
  } else {
    el.eccentricity = 0.0;
    el.arg_perigee = 0.0;
    true_anomaly = angle_about(node_hat, r_hat, h_hat);
  }

  const double ecc = el.eccentricity;
  const double E = 2.0 * std::atan2(std::sqrt(1.0 - ecc) * std::sin(0.5 * true_anomaly),
                                    std::sqrt(1.0 + ecc) * std::cos(0.5 * true_anomaly));
  el.mean_anomaly = wrap_two_pi(E - ecc * std::sin(E));
  return el;
}

Mat3 rtn_frame(const StateVector& sv) {
  const double r = sv.position.norm();
  const Vec3 h = sv.position.cross(sv.velocity);
  const double h_norm = h.norm();
  if (!(r > 0.0) || !(h_norm > 0.0)) throw ConversionError("rtn_frame: rectilinear or zero state");
  const Vec3 radial = sv.position / r;
  const Vec3 normal = h / h_norm;
  const Vec3 transverse = normal.cross(radial);
  Mat3 rot;
  rot.row(0) = radial.transpose();
  rot.row(1) = transverse.transpose();
  rot.row(2) = normal.transpose();
  return rot;
}

Mat6 rtn_frame6(const Mat3& rtn) {
  Mat6 out = Mat6::Zero();
  out.topLeftCorner<3, 3>() = rtn;
  out.bottomRightCorner<3, 3>() = rtn;
  return out;
}

}  // namespace cdmgen::astro
