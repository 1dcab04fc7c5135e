#include "cdmgen/tle.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>


namespace cdmgen::population {

namespace {

constexpr std::size_t kLineLength = 69;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

// column is 1-based, as in the format definition
std::string_view field(std::string_view line, std::size_t column, std::size_t width) {
  return line.substr(column - 1, width);
}

[[noreturn]] void field_error(int line, std::size_t column, std::string_view name, std::string_view text) {
  throw TleError(TleErrorKind::Field, line, column,
                 "TLE line " + std::to_string(line) + ": cannot parse " + std::string(name) + " from '" +
                     std::string(text) + "'");
}

double parse_double(std::string_view line, int line_no, std::size_t column, std::size_t width,
                    std::string_view name) {
  const std::string_view raw = field(line, column, width);
  std::string_view s = trim(raw);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) field_error(line_no, column, name, raw);
  return value;
}

int parse_int(std::string_view line, int line_no, std::size_t column, std::size_t width, std::string_view name,
              bool allow_blank = false) {
  const std::string_view raw = field(line, column, width);
  const std::string_view s = trim(raw);
  if (s.empty() && allow_blank) return 0;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) field_error(line_no, column, name, raw);
  return value;
}

// "s12345-4" style: sign, five mantissa digits with an implied leading decimal point, signed exponent
double parse_implied_exponent(std::string_view line, int line_no, std::size_t column, std::string_view name) {
  const std::string_view raw = field(line, column, 8);
  const char sign = raw[0];
  if (sign != ' ' && sign != '+' && sign != '-') field_error(line_no, column, name, raw);
  const std::string_view digits = raw.substr(1, 5);
  int mantissa = 0;
  for (char c : digits) {
    if (c == ' ') c = '0';
    if (c < '0' || c > '9') field_error(line_no, column, name, raw);
    mantissa = mantissa * 10 + (c - '0');
  }
  const char exp_sign = raw[6];
  const char exp_digit = raw[7];
  if ((exp_sign != '-' && exp_sign != '+' && exp_sign != ' ') || exp_digit < '0' || exp_digit > '9') {
    field_error(line_no, column, name, raw);
  }
  const int exponent = (exp_sign == '-' ? -1 : 1) * (exp_digit - '0');
  const double value = mantissa * 1e-5 * std::pow(10.0, exponent);
  return sign == '-' ? -value : value;
}

std::string format_implied_exponent(double x) {
  if (x == 0.0) return " 00000-0";
  const char sign = x < 0.0 ? '-' : ' ';
  const double ax = std::abs(x);
  int exponent = static_cast<int>(std::floor(std::log10(ax))) + 1;
  long digits = std::lround(ax / std::pow(10.0, exponent) * 1e5);
  if (digits >= 100000) {
    digits /= 10;
    ++exponent;
  }
  if (exponent > 9 || exponent < -9) throw std::out_of_range("value not representable in TLE exponent field");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%05ld%c%d", sign, digits, exponent < 0 ? '-' : '+', std::abs(exponent));
  return buf;
}

std::string format_first_derivative(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8f", std::abs(x));
  std::string s(buf);
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  return std::string(1, x < 0.0 ? '-' : ' ') + s;
}

void check_line(std::string_view line, int line_no) {
  if (line.size() != kLineLength) {
    throw TleError(TleErrorKind::LineLength, line_no, line.size(),
                   "TLE line " + std::to_string(line_no) + " has " + std::to_string(line.size()) +
                       " characters, expected 69");
  }
  if (line[0] != static_cast<char>('0' + line_no) || line[1] != ' ') {
    throw TleError(TleErrorKind::LineNumber, line_no, 1,
                   "TLE line " + std::to_string(line_no) + " does not start with '" + std::to_string(line_no) +
                       " '");
  }
}

int four_digit_year(int two_digit) { return two_digit < 57 ? 2000 + two_digit : 1900 + two_digit; }

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

double days_between_years(int from, int to) {
  double days = 0.0;
  if (from <= to) {
    for (int y = from; y < to; ++y) days += is_leap(y) ? 366.0 : 365.0;
  } else {
    for (int y = to; y < from; ++y) days -= is_leap(y) ? 366.0 : 365.0;
  }
  return days;
}

}  // namespace

astro::Epoch TleRecord::epoch_relative_to(int reference_year, double reference_day) const {
  const double days = days_between_years(reference_year, epoch_year) + epoch_day - reference_day;
  return astro::Epoch::from_days(days);
}

int tle_checksum(std::string_view line) {
  int sum = 0;
  const std::size_t n = std::min<std::size_t>(line.size(), 68);
  for (std::size_t k = 0; k < n; ++k) {
    const char c = line[k];
    if (c >= '0' && c <= '9') sum += c - '0';
    if (c == '-') sum += 1;
  }
  return sum % 10;
}

TleRecord parse_tle(std::string_view line1, std::string_view line2, bool verify_checksums) {
  check_line(line1, 1);
  check_line(line2, 2);

  TleRecord rec;
  rec.line1_checksum_ok = tle_checksum(line1) == line1[68] - '0';
  rec.line2_checksum_ok = tle_checksum(line2) == line2[68] - '0';
  if (verify_checksums) {
    if (!rec.line1_checksum_ok) {
      throw TleError(TleErrorKind::Checksum, 1, 69,
                     "TLE line 1 checksum mismatch: expected " + std::to_string(tle_checksum(line1)));
    }
    if (!rec.line2_checksum_ok) {
      throw TleError(TleErrorKind::Checksum, 2, 69,
                     "TLE line 2 checksum mismatch: expected " + std::to_string(tle_checksum(line2)));
    }
  }

  rec.catalog_number = parse_int(line1, 1, 3, 5, "catalog number");
  rec.classification = line1[7];
  rec.international_designator = std::string(trim(field(line1, 10, 8)));
  rec.epoch_year = four_digit_year(parse_int(line1, 1, 19, 2, "epoch year"));
  rec.epoch_day = parse_double(line1, 1, 21, 12, "epoch day");
  rec.mean_motion_dot = parse_double(line1, 1, 34, 10, "mean motion derivative");
  rec.mean_motion_ddot = parse_implied_exponent(line1, 1, 45, "mean motion second derivative");
  rec.bstar = parse_implied_exponent(line1, 1, 54, "bstar");
  rec.ephemeris_type = parse_int(line1, 1, 63, 1, "ephemeris type", true);
  rec.element_set_number = parse_int(line1, 1, 65, 4, "element set number", true);

  const int catalog2 = parse_int(line2, 2, 3, 5, "catalog number");
  if (catalog2 != rec.catalog_number) {
    throw TleError(TleErrorKind::CatalogMismatch, 2, 3, "TLE catalog numbers differ between lines");
  }
  rec.inclination_deg = parse_double(line2, 2, 9, 8, "inclination");
  rec.raan_deg = parse_double(line2, 2, 18, 8, "right ascension");
  const int ecc_digits = parse_int(line2, 2, 27, 7, "eccentricity");
  rec.eccentricity = ecc_digits * 1e-7;
  rec.arg_perigee_deg = parse_double(line2, 2, 35, 8, "argument of perigee");
  rec.mean_anomaly_deg = parse_double(line2, 2, 44, 8, "mean anomaly");
  rec.mean_motion = parse_double(line2, 2, 53, 11, "mean motion");
  rec.revolution_number = parse_int(line2, 2, 64, 5, "revolution number", true);
  return rec;
}

std::pair<std::string, std::string> format_tle(const TleRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "1 %05d%c %-8.8s %02d%012.8f %s %s %s %c %4d", r.catalog_number % 100000,
                r.classification, r.international_designator.c_str(), r.epoch_year % 100, r.epoch_day,
                format_first_derivative(r.mean_motion_dot).c_str(), format_implied_exponent(r.mean_motion_ddot).c_str(),
                format_implied_exponent(r.bstar).c_str(), static_cast<char>('0' + r.ephemeris_type % 10),
                r.element_set_number % 10000);
  std::string line1(buf);

  const long ecc = std::lround(r.eccentricity * 1e7);
  std::snprintf(buf, sizeof buf, "2 %05d %8.4f %8.4f %07ld %8.4f %8.4f %11.8f%5d", r.catalog_number % 100000,
                r.inclination_deg, r.raan_deg, ecc, r.arg_perigee_deg, r.mean_anomaly_deg, r.mean_motion,
                r.revolution_number % 100000);
  std::string line2(buf);

  if (line1.size() != 68 || line2.size() != 68) throw std::out_of_range("TLE field overflow while formatting");
  line1.push_back(static_cast<char>('0' + tle_checksum(line1)));
  line2.push_back(static_cast<char>('0' + tle_checksum(line2)));
  return {line1, line2};
}

TleFile read_tle_stream(std::istream& in, bool strict) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    lines.push_back(std::move(line));
  }

  TleFile out;
  std::string pending_name;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t line_number = i + 1;
    if (line.empty()) continue;
    const bool is_line1 = line.rfind("1 ", 0) == 0;
    const bool is_line2 = line.rfind("2 ", 0) == 0;
    if (!is_line1 && !is_line2) {
      pending_name = std::string(trim(line));
      continue;
    }
    try {
      if (is_line2) {
        throw TleError(TleErrorKind::LineNumber, 2, 1, "line 2 without a preceding line 1");
      }
      if (i + 1 >= lines.size() || lines[i + 1].rfind("2 ", 0) != 0) {
        throw TleError(TleErrorKind::LineNumber, 1, 1, "line 1 not followed by a line 2");
      }
      TleRecord rec = parse_tle(line, lines[i + 1], true);
      rec.name = pending_name;
      out.records.push_back(std::move(rec));
      ++i;
    } catch (const TleError& e) {
      const std::size_t bad_line = line_number + (e.line() == 2 && is_line1 ? 1 : 0);
      if (strict) {
        throw TleError(e.kind(), static_cast<int>(bad_line), e.column(),
                       std::string("TLE file line ") + std::to_string(bad_line) + ": " + e.what());
      }
      out.skipped.push_back({bad_line, e.what()});
      if (is_line1 && i + 1 < lines.size() && lines[i + 1].rfind("2 ", 0) == 0) ++i;
    }
    pending_name.clear();
  }
  return out;
}

TleFile read_tle_file(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open TLE file '" + path + "'");
  return read_tle_stream(in, strict);
}

astro::OrbitalElements to_elements(const TleRecord& r, astro::Epoch epoch) {
  using namespace astro::constants;
  astro::OrbitalElements el;
  el.semi_major_axis = astro::semi_major_axis_from_rev_per_day(r.mean_motion);
  el.eccentricity = r.eccentricity;
  el.inclination = r.inclination_deg * kDegToRad;
  el.raan = astro::wrap_two_pi(r.raan_deg * kDegToRad);
  el.arg_perigee = astro::wrap_two_pi(r.arg_perigee_deg * kDegToRad);
  el.mean_anomaly = astro::wrap_two_pi(r.mean_anomaly_deg * kDegToRad);
  el.bstar = r.bstar;
  el.epoch = epoch;
  return el;
}

TleRecord from_elements(const astro::OrbitalElements& el, int catalog_number, int reference_year,
                        double reference_day) {
  using namespace astro::constants;
  TleRecord r;
  r.catalog_number = catalog_number;
  r.international_designator = "";
  r.epoch_year = reference_year;
  r.epoch_day = reference_day + el.epoch.days();
  r.bstar = el.bstar;
  r.inclination_deg = el.inclination * kRadToDeg;
  r.raan_deg = astro::wrap_two_pi(el.raan) * kRadToDeg;
  r.eccentricity = el.eccentricity;
  r.arg_perigee_deg = astro::wrap_two_pi(el.arg_perigee) * kRadToDeg;
  r.mean_anomaly_deg = astro::wrap_two_pi(el.mean_anomaly) * kRadToDeg;
  r.mean_motion = el.mean_motion_rev_per_day();
  return r;
}

}  // namespace cdmgen::population
