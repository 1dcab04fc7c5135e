#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "cdmgen/astro.hpp"
#include "cdmgen/distributions.hpp"
#include "cdmgen/random.hpp"
#include "cdmgen/tle.hpp"

namespace cdmgen::population {

/// Elements carrying a prior. Mean motion is in rev/day, angles in radians.
enum class Element : std::size_t { MeanMotion, Eccentricity, Inclination, Raan, ArgPerigee, MeanAnomaly, Bstar };

inline constexpr std::size_t kElementCount = 7;
inline constexpr std::array<Element, kElementCount> kAllElements = {
    Element::MeanMotion, Element::Eccentricity, Element::Inclination, Element::Raan,
    Element::ArgPerigee, Element::MeanAnomaly,  Element::Bstar};
inline constexpr std::array<std::string_view, kElementCount> kElementNames = {
    "mean_motion", "eccentricity", "inclination", "raan", "arg_perigee", "mean_anomaly", "bstar"};

std::string_view element_name(Element e);
/// Throws ConfigError for unknown names.
Element element_from_name(std::string_view name);

inline constexpr double kLeoMinMeanMotion = 11.25;  // rev/day

/// Independent marginal priors over the orbital elements of one object.
struct PopulationPrior {
  std::array<dist::Distribution, kElementCount> marginals;

  const dist::Distribution& operator[](Element e) const { return marginals[static_cast<std::size_t>(e)]; }
  dist::Distribution& operator[](Element e) { return marginals[static_cast<std::size_t>(e)]; }
};

/// Catalog-shaped default used when no catalog or prior file is supplied.
PopulationPrior default_prior();

/// Throws ConfigError if a marginal uses an unsupported kind or leaves the element's valid range.
void validate(const PopulationPrior& prior);

/// Element value in prior units (mean motion rev/day, angles rad).
double element_value(const astro::OrbitalElements& el, Element e);

/// Sum of marginal log-densities; -inf outside the support.
double log_density(const PopulationPrior& prior, const astro::OrbitalElements& el);

/// Assembles elements at `epoch` from per-element draws: `draw(Element, const Distribution&) -> double`.
template <class Draw>
astro::OrbitalElements draw_object(const PopulationPrior& prior, astro::Epoch epoch, Draw&& draw) {
  astro::OrbitalElements el;
  double values[kElementCount];
  for (Element e : kAllElements) values[static_cast<std::size_t>(e)] = draw(e, prior[e]);
  el.semi_major_axis = astro::semi_major_axis_from_rev_per_day(values[0]);
  el.eccentricity = values[1];
  el.inclination = values[2];
  el.raan = astro::wrap_two_pi(values[3]);
  el.arg_perigee = astro::wrap_two_pi(values[4]);
  el.mean_anomaly = astro::wrap_two_pi(values[5]);
  el.bstar = values[6];
  el.epoch = epoch;
  return el;
}

/// True when the elements satisfy the element invariants and the perigee clears the Earth radius.
bool is_physical(const astro::OrbitalElements& el);

/// Independent draw per element, redrawn until physical. Throws RejectionCapExceeded.
astro::OrbitalElements sample_object(const PopulationPrior& prior, RandomStream& rng, astro::Epoch epoch = {},
                                     std::size_t max_attempts = 1000);

struct BinningPolicy {
  std::size_t bins = 30;
  double leo_min_mean_motion = kLeoMinMeanMotion;
};

/// Histogram priors from LEO catalog records: equal-width bins over the observed
/// range plus one empty guard bin on each side. Angle priors are Uniform(0, 2pi).
PopulationPrior fit_prior(std::span<const TleRecord> records, const BinningPolicy& policy = {});

}  // namespace cdmgen::population
