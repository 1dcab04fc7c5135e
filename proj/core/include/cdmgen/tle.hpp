#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "cdmgen/astro.hpp"
#include "cdmgen/errors.hpp"

namespace cdmgen::population {

/// One two-line element set. Angles in degrees, mean motion in rev/day, as printed.
struct TleRecord {
  std::string name;
  int catalog_number = 0;
  char classification = 'U';
  std::string international_designator;
  int epoch_year = 2000;     // four-digit year
  double epoch_day = 1.0;    // fractional day of year, 1.0 = Jan 1 00:00
  double mean_motion_dot = 0.0;
  double mean_motion_ddot = 0.0;
  double bstar = 0.0;
  int ephemeris_type = 0;
  int element_set_number = 0;
  double inclination_deg = 0.0;
  double raan_deg = 0.0;
  double eccentricity = 0.0;
  double arg_perigee_deg = 0.0;
  double mean_anomaly_deg = 0.0;
  double mean_motion = 0.0;  // rev/day
  int revolution_number = 0;
  bool line1_checksum_ok = true;
  bool line2_checksum_ok = true;

  /// Seconds from the reference (year, fractional day of year) to this record's epoch.
  astro::Epoch epoch_relative_to(int reference_year, double reference_day) const;
};

enum class TleErrorKind { LineLength, LineNumber, Checksum, Field, CatalogMismatch };

class TleError : public ParseError {
 public:
  TleError(TleErrorKind kind, int line, std::size_t column, const std::string& what)
      : ParseError(what, static_cast<std::size_t>(line), column), kind_(kind), line_(line) {}

  TleErrorKind kind() const { return kind_; }
  /// 1 or 2 for errors inside a record; the file line number when reading a file.
  int line() const { return line_; }

 private:
  TleErrorKind kind_;
  int line_;
};

/// Modulo-10 checksum over columns 1-68: digits count their value, '-' counts one.
int tle_checksum(std::string_view line);

/// Decodes a record from the standard 69-column layout. With `verify_checksums`
/// a checksum mismatch throws; otherwise it is reported through the record flags.
TleRecord parse_tle(std::string_view line1, std::string_view line2, bool verify_checksums = true);

/// Emits the two 69-column lines, checksums included.
std::pair<std::string, std::string> format_tle(const TleRecord& record);

struct TleFileIssue {
  std::size_t line_number;
  std::string message;
};

struct TleFile {
  std::vector<TleRecord> records;
  std::vector<TleFileIssue> skipped;
};

/// Reads consecutive line-1/line-2 pairs, each optionally preceded by a name line.
/// Strict mode throws on the first bad record (with its file line number);
/// lenient mode skips it and records the issue.
TleFile read_tle_stream(std::istream& in, bool strict = true);
TleFile read_tle_file(const std::string& path, bool strict = true);

/// Mean elements at `epoch` built from the record.
astro::OrbitalElements to_elements(const TleRecord& record, astro::Epoch epoch = {});
/// Record with the element fields filled from `el` (other fields default).
TleRecord from_elements(const astro::OrbitalElements& el, int catalog_number, int reference_year,
                        double reference_day);

}  // namespace cdmgen::population
