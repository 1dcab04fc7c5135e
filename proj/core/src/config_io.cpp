#include <fstream>
#include <set>
#include <sstream>

#include "cdmgen/errors.hpp"
#include "cdmgen/io.hpp"
#include "io_internal.hpp"

namespace cdmgen::io {

using detail::Json;

namespace {

constexpr const char* kConfigFormat = "cdmgen-config";
constexpr const char* kPriorFormat = "cdmgen-prior";

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.contains(key)) throw ConfigError("unknown key '" + key + "' in " + (where.empty() ? "config" : where));
  }
}

template <class T>
void read(const Json& j, const char* key, T& target, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    target = it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

template <class T>
T required(const Json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + " is missing '" + key + "'");
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

Json truncated_json(const dist::TruncatedNormal& t) {
  return {{"mean", t.mean}, {"stddev", t.stddev}, {"lower", t.lower}, {"upper", t.upper}};
}

dist::TruncatedNormal truncated_from(const Json& j, const std::string& where) {
  reject_unknown(j, {"mean", "stddev", "lower", "upper", "kind"}, where);
  return {required<double>(j, "mean", where), required<double>(j, "stddev", where), required<double>(j, "lower", where),
          required<double>(j, "upper", where)};
}

Json distribution_json(const dist::Distribution& d) {
  Json j = std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          return {{"mean", x.mean}, {"stddev", x.stddev}, {"period", x.period}};
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          return truncated_json(x);
        } else if constexpr (std::is_same_v<T, dist::Uniform> || std::is_same_v<T, dist::LogUniform>) {
          return {{"lower", x.lower}, {"upper", x.upper}};
        } else if constexpr (std::is_same_v<T, dist::Histogram>) {
          return {{"edges", x.edges}, {"masses", x.masses}};
        } else if constexpr (std::is_same_v<T, dist::Bernoulli>) {
          return {{"p", x.p}};
        } else {
          Json comps = Json::array();
          for (const auto& c : x.components) comps.push_back(truncated_json(c));
          return {{"weights", x.weights}, {"components", comps}};
        }
      },
      d);
  j["kind"] = std::string(dist::kind_name(d));
  return j;
}

dist::Distribution distribution_from(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const auto kind = required<std::string>(j, "kind", where);
  dist::Distribution d;
  if (kind == "normal") {
    reject_unknown(j, {"kind", "mean", "stddev", "period"}, where);
    dist::Normal n{required<double>(j, "mean", where), required<double>(j, "stddev", where), 0.0};
    read(j, "period", n.period, where);
    d = n;
  } else if (kind == "truncated_normal") {
    d = truncated_from(j, where);
  } else if (kind == "uniform" || kind == "log_uniform") {
    reject_unknown(j, {"kind", "lower", "upper"}, where);
    const double lo = required<double>(j, "lower", where), hi = required<double>(j, "upper", where);
    if (kind == "uniform") {
      d = dist::Uniform{lo, hi};
    } else {
      d = dist::LogUniform{lo, hi};
    }
  } else if (kind == "histogram") {
    reject_unknown(j, {"kind", "edges", "masses"}, where);
    d = dist::make_histogram(required<std::vector<double>>(j, "edges", where),
                             required<std::vector<double>>(j, "masses", where));
  } else if (kind == "bernoulli") {
    reject_unknown(j, {"kind", "p"}, where);
    d = dist::Bernoulli{required<double>(j, "p", where)};
  } else if (kind == "mixture") {
    reject_unknown(j, {"kind", "weights", "components"}, where);
    const auto comps = j.find("components");
    if (comps == j.end() || !comps->is_array()) throw ConfigError(where + ".components must be an array");
    std::vector<dist::TruncatedNormal> components;
    for (std::size_t k = 0; k < comps->size(); ++k) {
      components.push_back(truncated_from((*comps)[k], where + ".components[" + std::to_string(k) + "]"));
    }
    d = dist::make_mixture(required<std::vector<double>>(j, "weights", where), std::move(components));
  } else {
    throw ConfigError(where + ": unknown distribution kind '" + kind + "'");
  }
  dist::validate(d);
  return d;
}

Json prior_json(const population::PopulationPrior& prior) {
  Json j = Json::object();
  for (auto e : population::kAllElements) j[std::string(population::element_name(e))] = distribution_json(prior[e]);
  return j;
}

population::PopulationPrior prior_from(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  population::PopulationPrior prior = population::default_prior();
  for (const auto& [key, value] : j.items()) {
    const auto e = population::element_from_name(key);
    prior[e] = distribution_from(value, where + "." + key);
  }
  population::validate(prior);
  return prior;
}

const char* kind_text(prop::PropagatorKind k) {
  switch (k) {
    case prop::PropagatorKind::TwoBody:
      return "two_body";
    case prop::PropagatorKind::TwoBodyJ2:
      return "two_body_j2";
    case prop::PropagatorKind::TwoBodyJ2Drag:
      return "two_body_j2_drag";
  }
  return "two_body_j2_drag";
}

prop::PropagatorKind kind_from(const std::string& s) {
  if (s == "two_body") return prop::PropagatorKind::TwoBody;
  if (s == "two_body_j2") return prop::PropagatorKind::TwoBodyJ2;
  if (s == "two_body_j2_drag") return prop::PropagatorKind::TwoBodyJ2Drag;
  throw ConfigError("unknown propagator kind '" + s + "'");
}

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Vec3 vec_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(where + " must be a 3-element array");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const Json::exception&) {
    throw ConfigError(where + " must contain numbers");
  }
}

Json sensor_json(const cdm::SensorModel& s) {
  return {{"position_sigma_rtn_km", vec_json(s.position_sigma_rtn)},
          {"velocity_sigma_rtn_km_s", vec_json(s.velocity_sigma_rtn)},
          {"update_probability", s.update_probability}};
}

cdm::SensorModel sensor_from(const Json& j, cdm::SensorModel s, const std::string& where) {
  reject_unknown(j, {"position_sigma_rtn_km", "velocity_sigma_rtn_km_s", "update_probability"}, where);
  if (j.contains("position_sigma_rtn_km")) s.position_sigma_rtn = vec_from(j["position_sigma_rtn_km"], where);
  if (j.contains("velocity_sigma_rtn_km_s")) s.velocity_sigma_rtn = vec_from(j["velocity_sigma_rtn_km_s"], where);
  read(j, "update_probability", s.update_probability, where);
  return s;
}

Json config_json(const scenario::ScenarioConfig& c) {
  Json j{{"format", kConfigFormat},
         {"version", kFormatVersion},
         {"prior", prior_json(c.prior)},
         {"propagator",
          {{"kind", kind_text(c.propagator.kind)},
           {"drag_decay_per_day", c.propagator.drag_decay_per_day},
           {"j2", c.propagator.j2}}},
         {"window_days", c.window_days},
         {"threshold_km", c.threshold_km},
         {"screening_step_s", c.screening_step_s},
         {"target_sensor", sensor_json(c.target_sensor)},
         {"chaser_sensor", sensor_json(c.chaser_sensor)},
         {"cadence_s", c.cadence_s},
         {"jitter_s", c.jitter_s},
         {"lead_s", c.lead_s},
         {"n_mc_covariance", c.n_mc_covariance},
         {"hard_body_radius_km", c.hard_body_radius_km},
         {"likelihood_sigmas",
          {{"tca_s", c.likelihood_sigmas.tca_s},
           {"semi_major_axis_km", c.likelihood_sigmas.semi_major_axis_km},
           {"eccentricity", c.likelihood_sigmas.eccentricity},
           {"inclination_rad", c.likelihood_sigmas.inclination_rad}}}};
  if (c.chaser_prior) j["chaser_prior"] = prior_json(*c.chaser_prior);
  return j;
}

}  // namespace

std::string config_to_json(const scenario::ScenarioConfig& config) { return config_json(config).dump(2) + "\n"; }

scenario::ScenarioConfig config_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"format", "version", "prior", "chaser_prior", "propagator", "window_days", "threshold_km",
                  "screening_step_s", "target_sensor", "chaser_sensor", "cadence_s", "jitter_s", "lead_s",
                  "n_mc_covariance", "hard_body_radius_km", "likelihood_sigmas"},
                 "config");
  if (j.contains("format") && j["format"] != kConfigFormat) throw ConfigError("config format must be cdmgen-config");
  if (j.contains("version") && j["version"] != kFormatVersion) throw ConfigError("unsupported config version");

  scenario::ScenarioConfig c;
  const std::string root = "config";
  if (j.contains("prior")) c.prior = prior_from(j["prior"], "prior");
  if (j.contains("chaser_prior")) c.chaser_prior = prior_from(j["chaser_prior"], "chaser_prior");
  if (j.contains("propagator")) {
    const Json& p = j["propagator"];
    reject_unknown(p, {"kind", "drag_decay_per_day", "j2"}, "propagator");
    if (p.contains("kind")) c.propagator.kind = kind_from(required<std::string>(p, "kind", "propagator"));
    read(p, "drag_decay_per_day", c.propagator.drag_decay_per_day, "propagator");
    read(p, "j2", c.propagator.j2, "propagator");
  }
  read(j, "window_days", c.window_days, root);
  read(j, "threshold_km", c.threshold_km, root);
  read(j, "screening_step_s", c.screening_step_s, root);
  if (j.contains("target_sensor")) c.target_sensor = sensor_from(j["target_sensor"], c.target_sensor, "target_sensor");
  if (j.contains("chaser_sensor")) c.chaser_sensor = sensor_from(j["chaser_sensor"], c.chaser_sensor, "chaser_sensor");
  read(j, "cadence_s", c.cadence_s, root);
  read(j, "jitter_s", c.jitter_s, root);
  read(j, "lead_s", c.lead_s, root);
  read(j, "n_mc_covariance", c.n_mc_covariance, root);
  read(j, "hard_body_radius_km", c.hard_body_radius_km, root);
  if (j.contains("likelihood_sigmas")) {
    const Json& s = j["likelihood_sigmas"];
    const std::string where = "likelihood_sigmas";
    reject_unknown(s, {"tca_s", "semi_major_axis_km", "eccentricity", "inclination_rad"}, where);
    read(s, "tca_s", c.likelihood_sigmas.tca_s, where);
    read(s, "semi_major_axis_km", c.likelihood_sigmas.semi_major_axis_km, where);
    read(s, "eccentricity", c.likelihood_sigmas.eccentricity, where);
    read(s, "inclination_rad", c.likelihood_sigmas.inclination_rad, where);
  }
  scenario::validate(c);
  return c;
}

scenario::ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const std::string& path, const scenario::ScenarioConfig& config) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << config_to_json(config);
}

std::string config_hash(const scenario::ScenarioConfig& config) {
  return hex64(fnv1a64(config_json(config).dump()));
}

std::string prior_to_json(const population::PopulationPrior& prior) {
  Json j = prior_json(prior);
  j["format"] = kPriorFormat;
  j["version"] = kFormatVersion;
  return j.dump(2) + "\n";
}

population::PopulationPrior prior_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("prior is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("prior must be an object");
  if (j.value("format", std::string(kPriorFormat)) != kPriorFormat) throw ConfigError("prior format must be cdmgen-prior");
  if (j.value("version", kFormatVersion) != kFormatVersion) throw ConfigError("unsupported prior version");
  j.erase("format");
  j.erase("version");
  return prior_from(j, "prior");
}

}  // namespace cdmgen::io
