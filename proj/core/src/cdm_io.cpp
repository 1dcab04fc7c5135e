#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cdmgen/errors.hpp"
#include "cdmgen/io.hpp"
#include "cdmgen/tle.hpp"
#include "io_internal.hpp"

namespace cdmgen::io {

using detail::Json;

namespace {

constexpr const char* kCdmFormat = "cdmgen-cdm";
constexpr std::array<const char*, 6> kStateFields = {"X_KM", "Y_KM", "Z_KM", "VX_KM_S", "VY_KM_S", "VZ_KM_S"};

std::vector<std::string> make_columns() {
  std::vector<std::string> cols = {"EVENT_ID", "CREATION_EPOCH_S", "TCA_S", "MISS_DISTANCE_KM", "RELATIVE_SPEED_KM_S"};
  for (const char* obj : {"OBJ1_", "OBJ2_"}) {
    for (const char* f : kStateFields) cols.push_back(std::string(obj) + f);
    for (const auto& c : scenario::covariance_entry_names()) cols.push_back(obj + c);
    cols.push_back(std::string(obj) + "OBS_AGE_S");
    cols.push_back(std::string(obj) + "FRESH");
  }
  cols.push_back("PC");
  cols.push_back("PC_METHOD");
  return cols;
}

// Field values of one record in column order, already formatted.
std::vector<std::string> record_fields(const std::string& event_id, const cdm::CdmRecord& r, bool json) {
  std::vector<std::string> out;
  out.push_back(json ? Json(event_id).dump() : event_id);
  out.push_back(format_number(r.creation_epoch.seconds));
  out.push_back(format_number(r.tca_estimate.seconds));
  out.push_back(format_number(r.miss_distance_estimate));
  out.push_back(format_number(r.relative_speed_estimate));
  for (const cdm::ObjectReport* obj : {&r.target, &r.chaser}) {
    const Vec6 s = obj->state_at_tca.as_vector();
    for (int k = 0; k < 6; ++k) out.push_back(format_number(s[k]));
    for (double c : scenario::lower_triangle(obj->covariance_rtn)) out.push_back(format_number(c));
    out.push_back(format_number(obj->observation_age));
    out.push_back(obj->freshly_observed ? "true" : "false");
  }
  out.push_back(r.collision_probability ? format_number(*r.collision_probability) : "null");
  if (r.collision_probability_method.empty()) {
    out.push_back(json ? "null" : "");
  } else {
    out.push_back(json ? Json(r.collision_probability_method).dump() : r.collision_probability_method);
  }
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double number_field(const Json& j, const std::string& key, std::size_t row) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError("missing field " + key, row);
  if (!it->is_number()) throw ParseError("field " + key + " is not a number", row);
  return it->get<double>();
}

bool bool_field(const Json& j, const std::string& key, std::size_t row) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError("missing field " + key, row);
  if (!it->is_boolean()) throw ParseError("field " + key + " is not a boolean", row);
  return it->get<bool>();
}

cdm::ObjectReport read_object(const Json& j, const char* prefix, astro::Epoch tca, std::size_t row) {
  cdm::ObjectReport obj;
  const std::string p = prefix;
  Vec6 s;
  for (int k = 0; k < 6; ++k) s[k] = number_field(j, p + kStateFields[k], row);
  obj.state_at_tca = astro::StateVector::from_vector(s, tca);
  std::array<double, scenario::kCovarianceEntries> entries{};
  const auto& names = scenario::covariance_entry_names();
  for (std::size_t k = 0; k < entries.size(); ++k) entries[k] = number_field(j, p + names[k], row);
  obj.covariance_rtn = scenario::from_lower_triangle(entries);
  obj.observation_age = number_field(j, p + "OBS_AGE_S", row);
  obj.freshly_observed = bool_field(j, p + "FRESH", row);
  return obj;
}

Json elements_json(const astro::OrbitalElements& el) {
  return Json{{"SEMI_MAJOR_AXIS_KM", el.semi_major_axis},
              {"MEAN_MOTION_REV_PER_DAY", el.mean_motion_rev_per_day()},
              {"MEAN_MOTION_RAD_PER_S", el.mean_motion()},
              {"ECCENTRICITY", el.eccentricity},
              {"INCLINATION_RAD", el.inclination},
              {"RAAN_RAD", el.raan},
              {"ARG_PERIGEE_RAD", el.arg_perigee},
              {"MEAN_ANOMALY_RAD", el.mean_anomaly},
              {"EPOCH_S", el.epoch.seconds},
              {"BSTAR", el.bstar}};
}

Json state_json(const astro::StateVector& sv) {
  const Vec6 v = sv.as_vector();
  return Json::array({v[0], v[1], v[2], v[3], v[4], v[5]});
}

}  // namespace

const std::vector<std::string>& cdm_columns() {
  static const auto cols = make_columns();
  return cols;
}

void write_cdm_series(std::ostream& out, const cdm::CdmSeries& series) {
  out << "{\"FORMAT\":\"" << kCdmFormat << "\",\"VERSION\":" << kFormatVersion << "}\n";
  const auto& cols = cdm_columns();
  for (const auto& rec : series.records) {
    const auto fields = record_fields(series.event_id, rec, true);
    out << '{';
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k != 0) out << ',';
      out << '"' << cols[k] << "\":" << fields[k];
    }
    out << "}\n";
  }
}

void write_cdm_csv(std::ostream& out, const cdm::CdmSeries& series) {
  out << "# FORMAT=" << kCdmFormat << "-csv VERSION=" << kFormatVersion << '\n';
  const auto& cols = cdm_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (const auto& rec : series.records) {
    const auto fields = record_fields(series.event_id, rec, false);
    for (std::size_t k = 0; k < fields.size(); ++k) out << (k ? "," : "") << csv_cell(fields[k] == "null" ? "" : fields[k]);
    out << '\n';
  }
}

cdm::CdmSeries read_cdm_series(std::istream& in) {
  cdm::CdmSeries series;
  std::string line;
  std::size_t row = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = detail::parse_json(line, row);
    if (!have_header) {
      detail::check_version(j, kCdmFormat, row);
      have_header = true;
      continue;
    }
    if (!j.is_object()) throw ParseError("record is not an object", row);
    const auto id = j.find("EVENT_ID");
    if (id == j.end() || !id->is_string()) throw ParseError("missing field EVENT_ID", row);
    if (series.records.empty()) {
      series.event_id = id->get<std::string>();
    } else if (series.event_id != id->get<std::string>()) {
      throw ParseError("EVENT_ID differs from earlier records", row);
    }
    cdm::CdmRecord rec;
    rec.creation_epoch = astro::Epoch(number_field(j, "CREATION_EPOCH_S", row));
    rec.tca_estimate = astro::Epoch(number_field(j, "TCA_S", row));
    rec.miss_distance_estimate = number_field(j, "MISS_DISTANCE_KM", row);
    rec.relative_speed_estimate = number_field(j, "RELATIVE_SPEED_KM_S", row);
    rec.target = read_object(j, "OBJ1_", rec.tca_estimate, row);
    rec.chaser = read_object(j, "OBJ2_", rec.tca_estimate, row);
    if (const auto pc = j.find("PC"); pc != j.end() && !pc->is_null()) {
      if (!pc->is_number()) throw ParseError("field PC is not a number", row);
      rec.collision_probability = pc->get<double>();
    }
    if (const auto m = j.find("PC_METHOD"); m != j.end() && m->is_string()) {
      rec.collision_probability_method = m->get<std::string>();
    }
    if (!series.records.empty() && !(rec.creation_epoch > series.records.back().creation_epoch)) {
      throw ParseError("records are not in increasing creation order", row);
    }
    series.records.push_back(std::move(rec));
  }
  if (!have_header) throw ParseError("empty CDM file", 1);
  return series;
}

cdm::CdmSeries read_cdm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_cdm_series(in);
}

void write_ground_truth(std::ostream& out, const std::string& event_id, const conjunction::ConjunctionEvent& event,
                        const TruthMetadata& meta) {
  auto object = [&](const astro::OrbitalElements& el, const astro::StateVector& sv, int catalog) {
    const auto tle = population::format_tle(
        population::from_elements(el, catalog, meta.tle_reference_year, meta.tle_reference_day));
    return Json{{"ELEMENTS", elements_json(el)},
                {"TLE", Json::array({tle.first, tle.second})},
                {"STATE_AT_TCA", state_json(sv)}};
  };
  const Json j{{"FORMAT", "cdmgen-truth"},
               {"VERSION", kFormatVersion},
               {"EVENT_ID", event_id},
               {"TCA_S", event.tca.seconds},
               {"MISS_DISTANCE_KM", event.miss_distance},
               {"RELATIVE_SPEED_KM_S", event.relative_speed},
               {"SCREENING_THRESHOLD_KM", event.screening_threshold},
               {"WINDOW_START_S", event.window.start.seconds},
               {"WINDOW_END_S", event.window.end.seconds},
               {"ATTEMPTS", meta.attempts},
               {"SEED", meta.seed},
               {"TARGET", object(event.target_elements, event.target_state_at_tca, 1)},
               {"CHASER", object(event.chaser_elements, event.chaser_state_at_tca, 2)}};
  out << j.dump(2) << '\n';
}

// ---- reference covariances ----

void write_reference_covariances(std::ostream& out, const std::vector<scenario::ReferenceCovariance>& rows) {
  out << kReferenceHeader << "\nOBJECT";
  for (const auto& n : scenario::covariance_entry_names()) out << ',' << n;
  out << '\n';
  for (const auto& r : rows) {
    out << (r.object == scenario::ObjectRole::Target ? "TARGET" : "CHASER");
    for (double v : scenario::lower_triangle(r.covariance)) out << ',' << format_number(v);
    out << '\n';
  }
}

std::vector<scenario::ReferenceCovariance> read_reference_covariances(std::istream& in) {
  std::vector<scenario::ReferenceCovariance> out;
  std::string line;
  std::size_t row = 0;
  int stage = 0;  // 0: version line, 1: column header, 2: data
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (stage == 0) {
      if (line != kReferenceHeader) throw ParseError("missing covariance-reference v1 header", row);
      stage = 1;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (stage == 1) {
      if (cells.size() != 1 + scenario::kCovarianceEntries || cells[0] != "OBJECT") {
        throw ParseError("unexpected column header", row);
      }
      for (std::size_t k = 0; k < scenario::kCovarianceEntries; ++k) {
        if (cells[k + 1] != scenario::covariance_entry_names()[k]) {
          throw ParseError("unexpected column " + cells[k + 1], row, k + 2);
        }
      }
      stage = 2;
      continue;
    }
    if (cells.size() != 1 + scenario::kCovarianceEntries) {
      throw ParseError("expected 22 fields, found " + std::to_string(cells.size()), row);
    }
    scenario::ReferenceCovariance r;
    if (cells[0] == "TARGET") {
      r.object = scenario::ObjectRole::Target;
    } else if (cells[0] == "CHASER") {
      r.object = scenario::ObjectRole::Chaser;
    } else {
      throw ParseError("unknown object '" + cells[0] + "'", row, 1);
    }
    std::array<double, scenario::kCovarianceEntries> entries{};
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const std::string& cell = cells[k + 1];
      char* end = nullptr;
      entries[k] = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(entries[k])) {
        throw ParseError("malformed number '" + cell + "'", row, k + 2);
      }
    }
    r.covariance = scenario::from_lower_triangle(entries);
    out.push_back(r);
  }
  if (stage < 2) throw ParseError("reference file has no column header", row);
  if (out.empty()) throw ParseError("reference file has no rows", row);
  return out;
}

}  // namespace cdmgen::io
