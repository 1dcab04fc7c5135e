#pragma once

// Reference implementations used to check the library. They share no code with it
// beyond the plain value types.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "cdmgen/astro.hpp"
#include "cdmgen/conjunction.hpp"
#include "cdmgen/population.hpp"
#include "cdmgen/propagation.hpp"
#include "cdmgen/scenario.hpp"

namespace oracle {

using cdmgen::Vec3;

/// Solves E - e sin E = M by bisection on [M - 1, M + 1].
double kepler_bisection(double mean_anomaly, double eccentricity, double tolerance = 1e-14);

struct PointMassState {
  Vec3 r;
  Vec3 v;
};

/// Classic fourth-order Runge-Kutta on r'' = -mu r / |r|^3 with a fixed step.
PointMassState rk4_two_body(PointMassState s, double duration, double step);

/// Elements from the angular momentum, node and eccentricity vectors.
struct VectorElements {
  double a, e, i, raan, arg_perigee, true_anomaly, mean_anomaly;
};
VectorElements elements_from_vectors(const Vec3& r, const Vec3& v);

/// A close approach found by the brute-force search.
struct Approach {
  double tca;
  double miss;
};

/// Local minima of the separation on a fixed grid below `threshold`, each refined by
/// ternary search on the neighbouring grid interval.
std::vector<Approach> brute_force_minima(const cdmgen::conjunction::Trajectory& a,
                                         const cdmgen::conjunction::Trajectory& b, double start, double end,
                                         double step, double threshold);

/// Straight-line motion r(t) = r0 + v t, used as a stub propagator.
cdmgen::conjunction::Trajectory linear_trajectory(const Vec3& r0, const Vec3& v);

struct McEstimate {
  double value;
  double standard_error;
};

/// Fraction of draws from N(mean, diag(sx^2, sy^2)) landing inside the disc of radius R about the origin.
McEstimate mc_disc_probability(double mean_x, double mean_y, double sx, double sy, double radius, std::size_t draws,
                               std::uint64_t seed);

/// Random LEO elements with perigee above 6578 km.
cdmgen::astro::OrbitalElements random_leo(std::mt19937_64& rng, double max_eccentricity = 0.02);

/// Chaser whose path passes within `offset_km` of the target at `t0`, flying on a
/// differently oriented orbit through that point.
cdmgen::astro::OrbitalElements crossing_chaser(const cdmgen::astro::OrbitalElements& target, double t0,
                                               const cdmgen::prop::PropagatorSpec& spec, double offset_km,
                                               double plane_angle, double epoch = 0.0);

/// Prior whose every marginal is a single histogram bin of relative half-width
/// `relative_half_width` around the element value.
cdmgen::population::PopulationPrior point_mass_prior(const cdmgen::astro::OrbitalElements& el,
                                                     double relative_half_width = 1e-9);

/// Scenario whose priors are point masses on a random LEO target and a chaser built to
/// pass 1 km from it at 60 % of the window.
cdmgen::scenario::ScenarioConfig crossing_scenario(std::uint64_t seed, double window_days,
                                                   double relative_half_width = 1e-9);

/// Scenario whose priors are point masses on coplanar circular orbits 100 km apart.
cdmgen::scenario::ScenarioConfig separated_scenario();

}  // namespace oracle
