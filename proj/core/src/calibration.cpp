#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cdmgen/errors.hpp"
#include "cdmgen/scenario.hpp"

namespace cdmgen::scenario {

namespace {

constexpr std::array<const char*, 6> kAxes = {"R", "T", "N", "RDOT", "TDOT", "NDOT"};
constexpr std::array<std::size_t, 6> kDiagonal = {0, 2, 5, 9, 14, 20};

std::array<std::string, kCovarianceEntries> make_names() {
  std::array<std::string, kCovarianceEntries> out;
  std::size_t k = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j <= i; ++j) out[k++] = std::string("C_") + kAxes[i] + "_" + kAxes[j];
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Events and noise streams fixed once per calibration run.
struct CalibrationSet {
  std::vector<conjunction::ConjunctionEvent> events;
  RandomStream series_base{0};
};

CalibrationSet prepare(const ScenarioConfig& config, RandomStream& rng, const CalibrationOptions& options) {
  validate(config);
  if (options.events == 0) throw std::invalid_argument("calibration needs at least one event");
  const RandomStream base = rng.fork();
  RandomStream event_stream = base.derive(0);
  CalibrationSet set;
  set.series_base = base.derive(1);
  for (std::size_t i = 0; i < options.events; ++i) {
    auto r = rejection_sample_conjunction(config, event_stream, options.max_attempts_per_event,
                                          GenerateOptions{false, 0});
    set.events.push_back(std::move(r.event.event));
  }
  return set;
}

std::vector<ReferenceCovariance> evaluate(const CalibrationSet& set, const ScenarioConfig& config,
                                          double target_scale, double chaser_scale) {
  const auto target_sensor = config.target_sensor.scaled(target_scale);
  const auto chaser_sensor = config.chaser_sensor.scaled(chaser_scale);
  const auto policy = config.issuing_policy();
  std::vector<ReferenceCovariance> out;
  for (std::size_t i = 0; i < set.events.size(); ++i) {
    RandomStream stream = set.series_base.derive(i);
    cdm::CdmSeries series;
    try {
      series = cdm::issue_cdm_series(set.events[i], target_sensor, chaser_sensor, policy, config.propagator, stream);
    } catch (const Error&) {
      continue;
    }
    for (const auto& rec : series.records) {
      out.push_back({ObjectRole::Target, rec.target.covariance_rtn});
      out.push_back({ObjectRole::Chaser, rec.chaser.covariance_rtn});
    }
  }
  return out;
}

std::vector<double> entry_values(const std::vector<ReferenceCovariance>& covs, ObjectRole role, std::size_t entry) {
  std::vector<double> out;
  for (const auto& c : covs) {
    if (c.object == role) out.push_back(lower_triangle(c.covariance)[entry]);
  }
  return out;
}

// Per diagonal entry: log(median simulated / median reference).
std::array<double, 6> log_ratios(const std::vector<ReferenceCovariance>& sim, const std::vector<ReferenceCovariance>& ref,
                                 ObjectRole role) {
  std::array<double, 6> out{};
  for (std::size_t d = 0; d < 6; ++d) {
    const double s = quantile(entry_values(sim, role, kDiagonal[d]), 0.5);
    const double r = quantile(entry_values(ref, role, kDiagonal[d]), 0.5);
    if (s == r) {
      out[d] = 0.0;
    } else if (s > 0.0 && r > 0.0) {
      out[d] = std::log(s / r);
    } else {
      out[d] = s > r ? 50.0 : -50.0;
    }
  }
  return out;
}

double objective_of(const std::array<double, 6>& ratios) {
  double total = 0.0;
  for (double x : ratios) total += std::abs(x);
  return total;
}

int sign_sum(const std::array<double, 6>& ratios) {
  int s = 0;
  for (double x : ratios) s += (x > 0.0) - (x < 0.0);
  return s;
}

std::array<double, 5> quantiles(const std::vector<double>& v) {
  return {quantile(v, 0.05), quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75), quantile(v, 0.95)};
}

}  // namespace

const std::array<std::string, kCovarianceEntries>& covariance_entry_names() {
  static const auto names = make_names();
  return names;
}

std::array<double, kCovarianceEntries> lower_triangle(const Mat6& c) {
  std::array<double, kCovarianceEntries> out{};
  std::size_t k = 0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j <= i; ++j) out[k++] = c(i, j);
  }
  return out;
}

Mat6 from_lower_triangle(const std::array<double, kCovarianceEntries>& entries) {
  Mat6 c;
  std::size_t k = 0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j <= i; ++j) {
      c(i, j) = entries[k];
      c(j, i) = entries[k];
      ++k;
    }
  }
  return c;
}

std::vector<ReferenceCovariance> simulate_covariances(const ScenarioConfig& config, RandomStream& rng,
                                                      double target_scale, double chaser_scale,
                                                      const CalibrationOptions& options) {
  const auto set = prepare(config, rng, options);
  return evaluate(set, config, target_scale, chaser_scale);
}

CalibrationResult calibrate_sensors(const std::vector<ReferenceCovariance>& reference, const ScenarioConfig& config,
                                    RandomStream& rng, const CalibrationOptions& options) {
  for (ObjectRole role : {ObjectRole::Target, ObjectRole::Chaser}) {
    if (entry_values(reference, role, 0).empty()) {
      throw std::invalid_argument(std::string("reference has no ") +
                                  (role == ObjectRole::Target ? "target" : "chaser") + " covariances");
    }
  }
  const auto set = prepare(config, rng, options);

  CalibrationResult result;
  double scales[2] = {1.0, 1.0};
  double best_scales[2] = {1.0, 1.0};
  double best = std::numeric_limits<double>::infinity();

  // Returns the per-object ratios at the given scales and tracks the best point.
  auto evaluate_at = [&](double ts, double cs) {
    ++result.evaluations;
    const auto sim = evaluate(set, config, ts, cs);
    std::array<std::array<double, 6>, 2> ratios = {log_ratios(sim, reference, ObjectRole::Target),
                                                   log_ratios(sim, reference, ObjectRole::Chaser)};
    const double obj = objective_of(ratios[0]) + objective_of(ratios[1]);
    if (obj < best) {
      best = obj;
      best_scales[0] = ts;
      best_scales[1] = cs;
    }
    return std::pair{ratios, obj};
  };

  result.initial_objective = evaluate_at(1.0, 1.0).second;
  double previous = result.initial_objective;
  const double log_lo = std::log(options.min_scale);
  const double log_hi = std::log(options.max_scale);
  bool at_bound = false;

  for (std::size_t round = 0; round < options.max_rounds; ++round) {
    for (int object = 0; object < 2; ++object) {
      double lo = log_lo, hi = log_hi;
      while (hi - lo > options.log_bracket_tolerance) {
        const double mid = 0.5 * (lo + hi);
        double trial[2] = {scales[0], scales[1]};
        trial[object] = std::exp(mid);
        const auto [ratios, obj] = evaluate_at(trial[0], trial[1]);
        const int s = sign_sum(ratios[object]);
        if (s > 0) {
          hi = mid;
        } else if (s < 0) {
          lo = mid;
        } else {
          lo = hi = mid;
        }
      }
      const double chosen = 0.5 * (lo + hi);
      scales[object] = std::exp(chosen);
      at_bound = at_bound || chosen - log_lo < options.log_bracket_tolerance ||
                 log_hi - chosen < options.log_bracket_tolerance;
    }
    const double current = evaluate_at(scales[0], scales[1]).second;
    if (std::abs(current - previous) < options.objective_tolerance) break;
    previous = current;
  }

  result.target_scale = best_scales[0];
  result.chaser_scale = best_scales[1];
  result.objective = best;
  result.target_sensor = config.target_sensor.scaled(result.target_scale);
  result.chaser_sensor = config.chaser_sensor.scaled(result.chaser_scale);
  if (at_bound) {
    result.warning = true;
    result.warning_text = "noise scale reached the search bound";
  } else if (best >= result.initial_objective && result.initial_objective > options.objective_tolerance) {
    result.warning = true;
    result.warning_text = "search did not improve on the initial sensors";
  }

  const auto final_sim = evaluate(set, config, result.target_scale, result.chaser_scale);
  const auto& names = covariance_entry_names();
  for (ObjectRole role : {ObjectRole::Target, ObjectRole::Chaser}) {
    auto& rows = role == ObjectRole::Target ? result.report.target : result.report.chaser;
    for (std::size_t e = 0; e < kCovarianceEntries; ++e) {
      rows.push_back({names[e], quantiles(entry_values(final_sim, role, e)), quantiles(entry_values(reference, role, e))});
    }
  }
  return result;
}

}  // namespace cdmgen::scenario
