#include "cdmgen/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cdmgen/errors.hpp"

namespace cdmgen::population {

using namespace astro::constants;

std::string_view element_name(Element e) { return kElementNames[static_cast<std::size_t>(e)]; }

Element element_from_name(std::string_view name) {
  for (Element e : kAllElements) {
    if (element_name(e) == name) return e;
  }
  throw ConfigError("unknown orbital element '" + std::string(name) + "'");
}

PopulationPrior default_prior() {
  PopulationPrior prior;
  prior[Element::MeanMotion] = dist::make_mixture({0.35, 0.40, 0.25}, {
                                                                          {15.15, 0.25, 11.25, 16.5},
                                                                          {14.55, 0.30, 11.25, 16.5},
                                                                          {13.40, 0.80, 11.25, 16.5},
                                                                      });
  prior[Element::Eccentricity] = dist::LogUniform{1e-4, 2e-2};
  prior[Element::Inclination] = dist::make_mixture({0.45, 0.35, 0.20}, {
                                                                           {98.0 * kDegToRad, 3.0 * kDegToRad, 0.0, kPi},
                                                                           {53.0 * kDegToRad, 2.0 * kDegToRad, 0.0, kPi},
                                                                           {74.0 * kDegToRad, 3.0 * kDegToRad, 0.0, kPi},
                                                                       });
  prior[Element::Raan] = dist::Uniform{0.0, kTwoPi};
  prior[Element::ArgPerigee] = dist::Uniform{0.0, kTwoPi};
  prior[Element::MeanAnomaly] = dist::Uniform{0.0, kTwoPi};
  prior[Element::Bstar] = dist::LogUniform{1e-6, 1e-3};
  return prior;
}

void validate(const PopulationPrior& prior) {
  const double max_mean_motion = astro::rad_per_s_to_rev_per_day(std::sqrt(kMu / std::pow(kEarthRadius, 3)));
  for (Element e : kAllElements) {
    const auto& d = prior[e];
    const std::string name(element_name(e));
    if (std::holds_alternative<dist::Normal>(d) || std::holds_alternative<dist::Bernoulli>(d)) {
      throw ConfigError("prior for " + name + " must be uniform, truncated_normal, log_uniform, histogram or mixture");
    }
    dist::validate(d);
    const auto s = dist::support(d);
    switch (e) {
      case Element::MeanMotion:
        if (!(s.lower > 0.0 && s.upper < max_mean_motion)) {
          throw ConfigError("mean_motion prior support must lie in (0, " + std::to_string(max_mean_motion) +
                            ") rev/day");
        }
        break;
      case Element::Eccentricity:
        if (!(s.lower >= 0.0 && s.upper < 1.0)) throw ConfigError("eccentricity prior support must lie in [0, 1)");
        break;
      case Element::Inclination:
        if (!(s.lower >= 0.0 && s.upper <= kPi)) throw ConfigError("inclination prior support must lie in [0, pi]");
        break;
      default:
        break;
    }
  }
}

double element_value(const astro::OrbitalElements& el, Element e) {
  switch (e) {
    case Element::MeanMotion: return el.mean_motion_rev_per_day();
    case Element::Eccentricity: return el.eccentricity;
    case Element::Inclination: return el.inclination;
    case Element::Raan: return el.raan;
    case Element::ArgPerigee: return el.arg_perigee;
    case Element::MeanAnomaly: return el.mean_anomaly;
    case Element::Bstar: return el.bstar;
  }
  return 0.0;
}

double log_density(const PopulationPrior& prior, const astro::OrbitalElements& el) {
  double total = 0.0;
  for (Element e : kAllElements) total += dist::log_density(prior[e], element_value(el, e));
  return total;
}

bool is_physical(const astro::OrbitalElements& el) {
  const bool finite = std::isfinite(el.semi_major_axis) && std::isfinite(el.eccentricity) &&
                      std::isfinite(el.inclination) && std::isfinite(el.bstar);
  return finite && el.semi_major_axis > kEarthRadius && el.eccentricity >= 0.0 && el.eccentricity < 1.0 &&
         el.inclination >= 0.0 && el.inclination <= kPi && el.perigee_radius() > kEarthRadius;
}

astro::OrbitalElements sample_object(const PopulationPrior& prior, RandomStream& rng, astro::Epoch epoch,
                                     std::size_t max_attempts) {
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    auto el = draw_object(prior, epoch, [&rng](Element, const dist::Distribution& d) { return dist::sample(d, rng); });
    if (is_physical(el)) return el;
  }
  throw RejectionCapExceeded("sample_object: prior support rarely yields physical orbits", max_attempts);
}

namespace {

dist::Histogram fit_histogram(std::vector<double> values, std::size_t bins, double floor_value, double ceil_value) {
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  std::size_t n_bins = bins;
  if (hi <= lo) {
    const double half = std::max(std::abs(lo) * 1e-6, 1e-12);
    lo = std::max(lo - half, floor_value);
    hi = std::min(hi + half, ceil_value);
    n_bins = 1;
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);

  std::vector<double> edges;
  std::vector<double> masses;
  const double guard_lo = std::max(lo - width, floor_value);
  if (guard_lo < lo) {
    edges.push_back(guard_lo);
    masses.push_back(0.0);
  }
  const std::size_t first_bin = masses.size();
  for (std::size_t k = 0; k < n_bins; ++k) {
    edges.push_back(lo + static_cast<double>(k) * width);
    masses.push_back(0.0);
  }
  edges.push_back(hi);
  const double guard_hi = std::min(hi + width, ceil_value);
  if (guard_hi > hi) {
    edges.push_back(guard_hi);
    masses.push_back(0.0);
  }
  for (double v : values) {
    auto k = static_cast<std::size_t>(std::floor((v - lo) / width));
    k = std::min(k, n_bins - 1);
    masses[first_bin + k] += 1.0;
  }
  return dist::make_histogram(std::move(edges), std::move(masses));
}

}  // namespace

PopulationPrior fit_prior(std::span<const TleRecord> records, const BinningPolicy& policy) {
  if (policy.bins == 0) throw ConfigError("fit_prior: bin count must be positive");
  std::vector<double> mean_motion, ecc, incl, bstar;
  for (const auto& r : records) {
    if (!(r.mean_motion > policy.leo_min_mean_motion)) continue;
    mean_motion.push_back(r.mean_motion);
    ecc.push_back(r.eccentricity);
    incl.push_back(r.inclination_deg * kDegToRad);
    bstar.push_back(r.bstar);
  }
  if (mean_motion.empty()) throw ConfigError("fit_prior: no LEO records after filtering");

  constexpr double inf = std::numeric_limits<double>::infinity();
  const double max_mean_motion =
      std::nextafter(astro::rad_per_s_to_rev_per_day(std::sqrt(kMu / std::pow(kEarthRadius, 3))), 0.0);
  PopulationPrior prior;
  prior[Element::MeanMotion] = fit_histogram(std::move(mean_motion), policy.bins, policy.leo_min_mean_motion,
                                             max_mean_motion);
  prior[Element::Eccentricity] = fit_histogram(std::move(ecc), policy.bins, 0.0, std::nextafter(1.0, 0.0));
  prior[Element::Inclination] = fit_histogram(std::move(incl), policy.bins, 0.0, kPi);
  prior[Element::Raan] = dist::Uniform{0.0, kTwoPi};
  prior[Element::ArgPerigee] = dist::Uniform{0.0, kTwoPi};
  prior[Element::MeanAnomaly] = dist::Uniform{0.0, kTwoPi};
  prior[Element::Bstar] = fit_histogram(std::move(bstar), policy.bins, -inf, inf);
  return prior;
}

}  // namespace cdmgen::population
