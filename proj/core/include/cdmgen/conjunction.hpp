#pragma once

#include <functional>
#include <vector>

#include "cdmgen/astro.hpp"
#include "cdmgen/propagation.hpp"

namespace cdmgen::conjunction {

inline constexpr double kDefaultThresholdKm = 5.0;
inline constexpr double kDefaultStepS = 10.0;
inline constexpr double kTcaToleranceS = 1e-3;

struct TimeWindow {
  astro::Epoch start;
  astro::Epoch end;

  double duration() const { return end - start; }
  bool contains(astro::Epoch t) const { return t >= start && t <= end; }
};

struct ConjunctionEvent {
  astro::OrbitalElements target_elements;
  astro::OrbitalElements chaser_elements;
  astro::Epoch tca;
  double miss_distance = 0.0;   // km
  double relative_speed = 0.0;  // km/s
  astro::StateVector target_state_at_tca;
  astro::StateVector chaser_state_at_tca;
  double screening_threshold = kDefaultThresholdKm;
  TimeWindow window;
};

/// Miss distance recomputed from two states; used for every stored miss value.
double separation(const astro::StateVector& a, const astro::StateVector& b);

using Trajectory = std::function<astro::StateVector(astro::Epoch)>;

Trajectory make_trajectory(const astro::OrbitalElements& el, const prop::PropagatorSpec& spec);

struct TcaEstimate {
  astro::Epoch tca;
  double miss = 0.0;
};

/// Golden-section minimisation of squared separation on the bracket. Returns the
/// best of the refined point and the two endpoints. Throws NonUnimodalBracket when
/// the refined point is worse than both endpoints.
TcaEstimate refine_tca(const Trajectory& target, const Trajectory& chaser, TimeWindow bracket,
                       double tolerance_s = kTcaToleranceS);
TcaEstimate refine_tca(const astro::OrbitalElements& target, const astro::OrbitalElements& chaser,
                       TimeWindow bracket, const prop::PropagatorSpec& spec, double tolerance_s = kTcaToleranceS);

/// All close approaches below `threshold_km`, one per local minimum of the separation
/// on a `step_s` grid, refined and sorted by TCA. Runs of minima spaced less than 2 steps apart merge
/// into the deeper one. Decay errors are rethrown naming the object.
std::vector<ConjunctionEvent> screen_pair(const astro::OrbitalElements& target, const astro::OrbitalElements& chaser,
                                          TimeWindow window, const prop::PropagatorSpec& spec,
                                          double threshold_km = kDefaultThresholdKm, double step_s = kDefaultStepS);

/// Closest approach of two trajectories within a bracket, searched on a grid then refined.
TcaEstimate closest_approach_in(const Trajectory& target, const Trajectory& chaser, TimeWindow bracket,
                                double step_s = kDefaultStepS);

struct RelativeGeometry {
  Vec3 position_rtn;  // chaser minus target, km, target RTN frame
  Vec3 velocity_rtn;  // km/s
};

RelativeGeometry relative_geometry(const astro::StateVector& target, const astro::StateVector& chaser);
RelativeGeometry relative_geometry(const ConjunctionEvent& event);

}  // namespace cdmgen::conjunction
