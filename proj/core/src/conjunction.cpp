#include "cdmgen/conjunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cdmgen/errors.hpp"
#include "cdmgen/numerics.hpp"

namespace cdmgen::conjunction {

using astro::Epoch;
using astro::StateVector;
using namespace astro::constants;

double separation(const StateVector& a, const StateVector& b) { return (a.position - b.position).norm(); }

Trajectory make_trajectory(const astro::OrbitalElements& el, const prop::PropagatorSpec& spec) {
  return [el, spec](Epoch t) { return prop::propagate(el, t, spec); };
}

namespace {

Trajectory labelled(const astro::OrbitalElements& el, const prop::PropagatorSpec& spec, const char* label) {
  return [el, spec, label](Epoch t) {
    try {
      return prop::propagate(el, t, spec);
    } catch (const DecayError& e) {
      throw e.with_object(label);
    }
  };
}

// Upper bound on orbital speed over the window (vis-viva at the lowest perigee, largest a).
double max_speed(const astro::OrbitalElements& el, TimeWindow window, const prop::PropagatorSpec& spec) {
  const auto range = prop::semi_major_axis_range(el, window.start, window.end, spec);
  const double r_min = range.min * (1.0 - el.eccentricity);
  if (!(r_min > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(kMu * (2.0 / r_min - 1.0 / range.max));
}

bool radial_bands_separated(const astro::OrbitalElements& a, const astro::OrbitalElements& b, TimeWindow window,
                            const prop::PropagatorSpec& spec, double threshold) {
  const auto ra = prop::semi_major_axis_range(a, window.start, window.end, spec);
  const auto rb = prop::semi_major_axis_range(b, window.start, window.end, spec);
  const double a_lo = ra.min * (1.0 - a.eccentricity), a_hi = ra.max * (1.0 + a.eccentricity);
  const double b_lo = rb.min * (1.0 - b.eccentricity), b_hi = rb.max * (1.0 + b.eccentricity);
  const double gap = std::max(b_lo - a_hi, a_lo - b_hi);
  return gap > threshold;
}

struct Candidate {
  Epoch tca;
  double miss;
  StateVector target;
  StateVector chaser;
};

}  // namespace

TcaEstimate refine_tca(const Trajectory& target, const Trajectory& chaser, TimeWindow bracket, double tolerance_s) {
  if (bracket.end < bracket.start) throw std::invalid_argument("refine_tca: bracket end precedes start");
  auto sq = [&](double t) { return (target(Epoch(t)).position - chaser(Epoch(t)).position).squaredNorm(); };
  const double a = bracket.start.seconds;
  const double b = bracket.end.seconds;
  const double fa = sq(a);
  if (b == a) return {bracket.start, std::sqrt(fa)};
  const double fb = sq(b);

  const auto best = numerics::golden_section_minimize(sq, a, b, tolerance_s);
  const double worst_end = std::max(fa, fb);
  if (best.f > worst_end * (1.0 + 1e-12) + 1e-18) {
    throw NonUnimodalBracket("refine_tca: refined separation exceeds both bracket endpoints");
  }
  // exact ties resolve to the earliest time
  double t = a;
  double f = fa;
  if (best.f < f) {
    t = best.x;
    f = best.f;
  }
  if (fb < f) {
    t = b;
    f = fb;
  }
  return {Epoch(t), std::sqrt(f)};
}

TcaEstimate refine_tca(const astro::OrbitalElements& target, const astro::OrbitalElements& chaser, TimeWindow bracket,
                       const prop::PropagatorSpec& spec, double tolerance_s) {
  return refine_tca(make_trajectory(target, spec), make_trajectory(chaser, spec), bracket, tolerance_s);
}

std::vector<ConjunctionEvent> screen_pair(const astro::OrbitalElements& target, const astro::OrbitalElements& chaser,
                                          TimeWindow window, const prop::PropagatorSpec& spec, double threshold_km,
                                          double step_s) {
  if (window.end < window.start) throw std::invalid_argument("screen_pair: empty window");
  if (!(threshold_km > 0.0)) throw std::invalid_argument("screen_pair: threshold must be positive");
  if (!(step_s > 0.0)) throw std::invalid_argument("screen_pair: step must be positive");

  const Trajectory target_traj = labelled(target, spec, "target");
  const Trajectory chaser_traj = labelled(chaser, spec, "chaser");
  // semi-major axes are monotone in time, so decay inside the window shows at one of its ends
  for (Epoch t : {window.start, window.end}) {
    target_traj(t);
    chaser_traj(t);
  }

  if (radial_bands_separated(target, chaser, window, spec, threshold_km)) return {};

  const std::size_t n = prop::ephemeris_length(window.start, window.end, step_s);
  auto time_at = [&](std::size_t k) { return window.start + static_cast<double>(k) * step_s; };

  // separation is Lipschitz with constant `speed_bound`
  const double speed_bound = 1.001 * (max_speed(target, window, spec) + max_speed(chaser, window, spec));
  const double candidate_level = threshold_km + 0.5 * speed_bound * step_s;

  std::size_t cached_k[3] = {n, n, n};
  double cached_d[3] = {0.0, 0.0, 0.0};
  std::size_t cache_slot = 0;
  auto distance = [&](std::size_t k) {
    for (int s = 0; s < 3; ++s) {
      if (cached_k[s] == k) return cached_d[s];
    }
    const Epoch t = time_at(k);
    const double d = separation(target_traj(t), chaser_traj(t));
    cached_k[cache_slot] = k;
    cached_d[cache_slot] = d;
    cache_slot = (cache_slot + 1) % 3;
    return d;
  };

  std::vector<std::size_t> grid_minima;
  std::size_t k = 0;
  while (k < n) {
    const double d = distance(k);
    if (d > candidate_level) {
      const double reach = (d - candidate_level) / (speed_bound * step_s);
      const double skip = std::isfinite(reach) ? std::floor(reach) : 1.0;
      k += std::max<std::size_t>(1, static_cast<std::size_t>(std::min(skip, static_cast<double>(n))));
      continue;
    }
    const double prev = k > 0 ? distance(k - 1) : std::numeric_limits<double>::infinity();
    const double next = k + 1 < n ? distance(k + 1) : std::numeric_limits<double>::infinity();
    if (d <= prev && d <= next) grid_minima.push_back(k);
    ++k;
  }

  std::vector<Candidate> refined;
  refined.reserve(grid_minima.size());
  for (std::size_t m : grid_minima) {
    const Epoch t_grid = time_at(m);
    const TimeWindow bracket{std::max(window.start, t_grid - step_s), std::min(window.end, t_grid + step_s)};
    TcaEstimate est = refine_tca(target_traj, chaser_traj, bracket);
    if (distance(m) < est.miss) est = {t_grid, distance(m)};
    Candidate c{est.tca, 0.0, target_traj(est.tca), chaser_traj(est.tca)};
    c.miss = separation(c.target, c.chaser);
    refined.push_back(std::move(c));
  }

  // chains of candidates with neighbouring TCAs closer than two steps collapse into the deepest one
  std::vector<Candidate> merged;
  Epoch chain_end;
  for (auto& c : refined) {
    const Epoch tca = c.tca;
    if (!merged.empty() && tca - chain_end < 2.0 * step_s) {
      if (c.miss < merged.back().miss) merged.back() = std::move(c);
    } else {
      merged.push_back(std::move(c));
    }
    chain_end = tca;
  }

  std::vector<ConjunctionEvent> events;
  for (auto& c : merged) {
    if (!(c.miss < threshold_km)) continue;
    ConjunctionEvent ev;
    ev.target_elements = target;
    ev.chaser_elements = chaser;
    ev.tca = c.tca;
    ev.miss_distance = c.miss;
    ev.relative_speed = (c.chaser.velocity - c.target.velocity).norm();
    ev.target_state_at_tca = c.target;
    ev.chaser_state_at_tca = c.chaser;
    ev.screening_threshold = threshold_km;
    ev.window = window;
    events.push_back(std::move(ev));
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.tca < b.tca; });
  return events;
}

TcaEstimate closest_approach_in(const Trajectory& target, const Trajectory& chaser, TimeWindow bracket,
                                double step_s) {
  const std::size_t n = prop::ephemeris_length(bracket.start, bracket.end, step_s);
  std::size_t best_k = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const Epoch t = bracket.start + static_cast<double>(k) * step_s;
    const double d = separation(target(t), chaser(t));
    if (d < best_d) {
      best_d = d;
      best_k = k;
    }
  }
  const Epoch t_best = bracket.start + static_cast<double>(best_k) * step_s;
  const TimeWindow local{std::max(bracket.start, t_best - step_s), std::min(bracket.end, t_best + step_s)};
  TcaEstimate est = refine_tca(target, chaser, local);
  if (best_d < est.miss) est = {t_best, best_d};
  return est;
}

RelativeGeometry relative_geometry(const StateVector& target, const StateVector& chaser) {
  const Mat3 rot = astro::rtn_frame(target);
  return {rot * (chaser.position - target.position), rot * (chaser.velocity - target.velocity)};
}

RelativeGeometry relative_geometry(const ConjunctionEvent& event) {
  return relative_geometry(event.target_state_at_tca, event.chaser_state_at_tca);
}

}  // namespace cdmgen::conjunction
