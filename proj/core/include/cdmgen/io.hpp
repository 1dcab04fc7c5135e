#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cdmgen/cdm.hpp"
#include "cdmgen/population.hpp"
#include "cdmgen/ppl.hpp"
#include "cdmgen/scenario.hpp"

namespace cdmgen::io {

inline constexpr int kFormatVersion = 1;

/// "%.17g", or "null" for non-finite values.
std::string format_number(double x);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// ---- CDM series ----

/// Column names shared by the line-delimited and tabular CDM formats.
const std::vector<std::string>& cdm_columns();

/// Version header line followed by one JSON object per record.
void write_cdm_series(std::ostream& out, const cdm::CdmSeries& series);
/// Header row plus one row per record with the same columns.
void write_cdm_csv(std::ostream& out, const cdm::CdmSeries& series);
/// Reads the line-delimited format. Throws ParseError naming the line.
cdm::CdmSeries read_cdm_series(std::istream& in);
cdm::CdmSeries read_cdm_file(const std::string& path);

struct TruthMetadata {
  std::size_t attempts = 0;
  std::uint64_t seed = 0;
  int tle_reference_year = 2000;
  double tle_reference_day = 1.0;
};

/// Ground-truth sidecar: elements, TLE lines and states at TCA of both objects.
void write_ground_truth(std::ostream& out, const std::string& event_id, const conjunction::ConjunctionEvent& event,
                        const TruthMetadata& meta);

// ---- configuration ----

std::string config_to_json(const scenario::ScenarioConfig& config);
/// Missing keys keep their defaults; unknown keys throw ConfigError.
scenario::ScenarioConfig config_from_json(std::string_view text);
scenario::ScenarioConfig load_config(const std::string& path);
void save_config(const std::string& path, const scenario::ScenarioConfig& config);
/// Hash of the canonical JSON form.
std::string config_hash(const scenario::ScenarioConfig& config);

std::string prior_to_json(const population::PopulationPrior& prior);
population::PopulationPrior prior_from_json(std::string_view text);

// ---- reference covariances ----

inline constexpr const char* kReferenceHeader = "# cdmgen covariance-reference v1";

void write_reference_covariances(std::ostream& out, const std::vector<scenario::ReferenceCovariance>& rows);
/// Throws ParseError naming the file line of the first malformed row.
std::vector<scenario::ReferenceCovariance> read_reference_covariances(std::istream& in);

// ---- posterior dump ----

struct PosteriorHeader {
  std::vector<std::pair<std::string, double>> numbers;
  std::vector<std::pair<std::string, std::string>> texts;
};

/// Header line with the site list and metadata, then one line per sample holding
/// LOG_WEIGHT (null for -inf) and the scalar site values.
void write_posterior(std::ostream& out, const ppl::WeightedPosterior& posterior, const std::vector<std::string>& sites,
                     const PosteriorHeader& header = {});

struct PosteriorSamples {
  std::vector<std::string> sites;
  std::vector<double> log_weights;
  std::vector<std::vector<double>> values;  // [sample][site], NaN when absent
};

PosteriorSamples read_posterior(std::istream& in);

struct Histogram1d {
  std::vector<double> edges;
  std::vector<double> masses;
};

/// Self-normalised weighted histogram of one site of a dump.
Histogram1d posterior_histogram(const PosteriorSamples& samples, const std::string& site, std::size_t bins);

}  // namespace cdmgen::io
