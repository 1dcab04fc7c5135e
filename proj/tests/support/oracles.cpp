#include "oracles.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

namespace {
constexpr double kMu = 398600.4418;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double fold(double x) {
  x = std::fmod(x, kTwoPi);
  return x < 0.0 ? x + kTwoPi : x;
}
}  // namespace

double kepler_bisection(double mean_anomaly, double eccentricity, double tolerance) {
  double lo = mean_anomaly - 1.0;
  double hi = mean_anomaly + 1.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid - eccentricity * std::sin(mid) - mean_anomaly < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (mid == lo && mid == hi) break;
  }
  return 0.5 * (lo + hi);
}

PointMassState rk4_two_body(PointMassState s, double duration, double step) {
  auto accel = [](const Vec3& r) { return Vec3(-kMu * r / std::pow(r.norm(), 3)); };
  const auto n = static_cast<long>(std::llround(duration / step));
  for (long k = 0; k < n; ++k) {
    const Vec3 k1r = s.v, k1v = accel(s.r);
    const Vec3 k2r = s.v + 0.5 * step * k1v, k2v = accel(s.r + 0.5 * step * k1r);
    const Vec3 k3r = s.v + 0.5 * step * k2v, k3v = accel(s.r + 0.5 * step * k2r);
    const Vec3 k4r = s.v + step * k3v, k4v = accel(s.r + step * k3r);
    s.r += step / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    s.v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return s;
}

VectorElements elements_from_vectors(const Vec3& r, const Vec3& v) {
  VectorElements out{};
  const Vec3 h = r.cross(v);
  const Vec3 node = Vec3::UnitZ().cross(h);
  const Vec3 ecc = ((v.squaredNorm() - kMu / r.norm()) * r - r.dot(v) * v) / kMu;
  const double energy = 0.5 * v.squaredNorm() - kMu / r.norm();
  out.a = -kMu / (2.0 * energy);
  out.e = ecc.norm();
  out.i = std::acos(h.z() / h.norm());
  out.raan = std::acos(node.x() / node.norm());
  if (node.y() < 0.0) out.raan = kTwoPi - out.raan;
  out.arg_perigee = std::acos(std::clamp(node.dot(ecc) / (node.norm() * out.e), -1.0, 1.0));
  if (ecc.z() < 0.0) out.arg_perigee = kTwoPi - out.arg_perigee;
  out.true_anomaly = std::acos(std::clamp(ecc.dot(r) / (out.e * r.norm()), -1.0, 1.0));
  if (r.dot(v) < 0.0) out.true_anomaly = kTwoPi - out.true_anomaly;
  const double ecc_anomaly =
      2.0 * std::atan(std::sqrt((1.0 - out.e) / (1.0 + out.e)) * std::tan(0.5 * out.true_anomaly));
  out.mean_anomaly = fold(ecc_anomaly - out.e * std::sin(ecc_anomaly));
  return out;
}

std::vector<Approach> brute_force_minima(const cdmgen::conjunction::Trajectory& a,
                                         const cdmgen::conjunction::Trajectory& b, double start, double end,
                                         double step, double threshold) {
  using cdmgen::astro::Epoch;
  auto dist = [&](double t) { return (a(Epoch(t)).position - b(Epoch(t)).position).norm(); };
  const auto n = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<Approach> out;
  double prev = dist(start);
  double cur = n > 1 ? dist(start + step) : prev;
  auto refine = [&](double t) {
    double lo = std::max(start, t - step), hi = std::min(end, t + step);
    for (int it = 0; it < 200 && hi - lo > 1e-7; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (dist(m1) < dist(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    const double tr = 0.5 * (lo + hi);
    const double dr = dist(tr);
    const double dg = dist(t);
    return dg < dr ? Approach{t, dg} : Approach{tr, dr};
  };
  if (n > 1 && prev <= cur && prev < threshold + 1.0) {
    auto ap = refine(start);
    if (ap.miss < threshold) out.push_back(ap);
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double t = start + static_cast<double>(k) * step;
    const double next = dist(t + step);
    if (cur <= prev && cur <= next && cur < threshold + 1.0) {
      auto ap = refine(t);
      if (ap.miss < threshold) out.push_back(ap);
    }
    prev = cur;
    cur = next;
  }
  if (n > 1 && cur <= prev) {
    auto ap = refine(start + static_cast<double>(n - 1) * step);
    if (ap.miss < threshold) out.push_back(ap);
  }
  return out;
}

cdmgen::conjunction::Trajectory linear_trajectory(const Vec3& r0, const Vec3& v) {
  return [r0, v](cdmgen::astro::Epoch t) {
    cdmgen::astro::StateVector s;
    s.position = r0 + v * t.seconds;
    s.velocity = v;
    s.epoch = t;
    return s;
  };
}

McEstimate mc_disc_probability(double mean_x, double mean_y, double sx, double sy, double radius, std::size_t draws,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::size_t hits = 0;
  const double r2 = radius * radius;
  for (std::size_t k = 0; k < draws; ++k) {
    const double x = mean_x + sx * gauss(rng);
    const double y = mean_y + sy * gauss(rng);
    if (x * x + y * y <= r2) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(draws);
  return {p, std::sqrt(std::max(p * (1.0 - p), 1.0 / static_cast<double>(draws)) / static_cast<double>(draws))};
}

cdmgen::astro::OrbitalElements random_leo(std::mt19937_64& rng, double max_eccentricity) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  cdmgen::astro::OrbitalElements el;
  el.eccentricity = max_eccentricity * u(rng);
  const double perigee = 6578.0 + 1200.0 * u(rng);
  el.semi_major_axis = perigee / (1.0 - el.eccentricity);
  el.inclination = std::numbers::pi * u(rng);
  el.raan = kTwoPi * u(rng);
  el.arg_perigee = kTwoPi * u(rng);
  el.mean_anomaly = kTwoPi * u(rng);
  el.bstar = 1e-5 * u(rng);
  return el;
}

cdmgen::astro::OrbitalElements crossing_chaser(const cdmgen::astro::OrbitalElements& target, double t0,
                                               const cdmgen::prop::PropagatorSpec& spec, double offset_km,
                                               double plane_angle, double epoch) {
  using namespace cdmgen;
  const astro::StateVector at = prop::propagate(target, astro::Epoch(t0), spec);
  const Vec3 radial = at.position.normalized();
  const Eigen::AngleAxisd turn(plane_angle, radial);
  astro::StateVector chaser;
  chaser.position = at.position + offset_km * radial;
  chaser.velocity = turn * at.velocity;
  chaser.epoch = astro::Epoch(t0);
  auto el = astro::state_to_elements(chaser, target.bstar);
  if (epoch != t0) el = prop::propagate_elements(el, astro::Epoch(epoch), spec);
  return el;
}


cdmgen::population::PopulationPrior point_mass_prior(const cdmgen::astro::OrbitalElements& el,
                                                     double relative_half_width) {
  using cdmgen::population::Element;
  cdmgen::population::PopulationPrior prior;
  for (Element e : cdmgen::population::kAllElements) {
    const double v = cdmgen::population::element_value(el, e);
    const double half = std::max(std::abs(v) * relative_half_width, 1e-12);
    double lo = v - half, hi = v + half;
    if (e == Element::Eccentricity || e == Element::Inclination) lo = std::max(lo, 0.0);
    if (e == Element::Inclination) hi = std::min(hi, cdmgen::astro::constants::kPi);
    prior[e] = cdmgen::dist::make_histogram({lo, hi}, {1.0});
  }
  return prior;
}

cdmgen::scenario::ScenarioConfig crossing_scenario(std::uint64_t seed, double window_days,
                                                   double relative_half_width) {
  std::mt19937_64 rng(seed);
  cdmgen::scenario::ScenarioConfig config;
  const auto target = random_leo(rng);
  const double t0 = 0.6 * window_days * 86400.0;
  const auto chaser = crossing_chaser(target, t0, config.propagator, 1.0, 1.2);
  config.prior = point_mass_prior(target, relative_half_width);
  config.chaser_prior = point_mass_prior(chaser, relative_half_width);
  config.window_days = window_days;
  config.lead_s = std::min(7.0, window_days) * 86400.0;
  return config;
}

cdmgen::scenario::ScenarioConfig separated_scenario() {
  cdmgen::astro::OrbitalElements a;
  a.semi_major_axis = 7000.0;
  a.inclination = 0.5;
  a.raan = 0.3;
  a.bstar = 1e-8;
  auto b = a;
  b.semi_major_axis = 7100.0;
  b.mean_anomaly = 2.0;
  cdmgen::scenario::ScenarioConfig config;
  config.prior = point_mass_prior(a);
  config.chaser_prior = point_mass_prior(b);
  config.window_days = 1.0;
  config.lead_s = 86400.0;
  return config;
}

}  // namespace oracle
