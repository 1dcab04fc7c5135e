#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdmgen/ppl.hpp"
#include "cdmgen/scenario.hpp"

namespace cdmgen::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitNoConjunction = 2,
  kExitDegeneratePosterior = 3,
  kExitParseError = 4,
  kExitCapExhausted = 5,
};

/// Options shared by commands that load a scenario configuration.
struct ConfigOptions {
  std::string config_path;  // empty: built-in defaults
  std::optional<double> threshold_km;
  std::optional<double> cadence_h;
};

scenario::ScenarioConfig resolve_config(const ConfigOptions& options);

struct GenerateArgs {
  ConfigOptions config;
  std::size_t n_events = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::size_t workers = 1;
  std::size_t max_attempts = 2'000'000;
};

/// Per-event CDM files, truth sidecars, a config copy, and manifest.json written last.
int cmd_generate(const GenerateArgs& args, std::ostream& log);

struct SimulateArgs {
  ConfigOptions config;
  std::uint64_t seed = 0;
  std::string trace_out;  // orbit-trace CSV; empty: not written
  double trace_step_s = 60.0;
  std::string cdm_out;  // empty: not written
  std::size_t max_attempts = 1;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out);

struct InferArgs {
  ConfigOptions config;
  std::string cdm_path;
  std::size_t n_samples = 10'000;
  std::uint64_t seed = 0;
  std::string out;  // posterior dump; diagnostics go to <out>.diagnostics.json
  std::size_t workers = 1;
  scenario::Conditioning conditioning;
  double sigma_scale = 1.0;
};

int cmd_infer(const InferArgs& args, std::ostream& out);

struct CalibrateArgs {
  ConfigOptions config;
  std::string reference_path;
  std::string out_config;
  std::string report_path;  // empty: <out_config>.report.json
  std::uint64_t seed = 0;
  std::size_t events = 12;
};

int cmd_calibrate(const CalibrateArgs& args, std::ostream& out);

struct ReferenceArgs {
  ConfigOptions config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t events = 12;
  double target_scale = 1.0;
  double chaser_scale = 1.0;
};

int cmd_reference_covariances(const ReferenceArgs& args, std::ostream& out);

struct HistogramArgs {
  std::string posterior_path;
  std::vector<std::string> sites;  // empty: all sites in the dump
  std::size_t bins = 30;
  std::string out;  // empty: standard output
};

/// Weighted posterior and unweighted proposal histograms per site, as CSV.
int cmd_histogram(const HistogramArgs& args, std::ostream& out);

struct FitPriorArgs {
  std::string tle_path;
  std::size_t bins = 30;
  bool strict = false;
  std::string out;
};

int cmd_fit_prior(const FitPriorArgs& args, std::ostream& out);

int cmd_default_config(const std::string& out_path, std::ostream& out);

/// Runs `body`, mapping library exceptions to exit codes and messages on `err`.
int guarded(std::ostream& err, const std::function<int()>& body);

struct SiteRatio {
  std::string site;
  double proposal_variance;
  double posterior_variance;
  double ratio;
};

/// Posterior (weighted) over proposal (unweighted) variance for each site.
/// Angle sites use circular statistics.
std::vector<SiteRatio> variance_ratios(const ppl::WeightedPosterior& posterior, const std::vector<std::string>& sites);

bool is_angle_site(const std::string& site);

}  // namespace cdmgen::cli
