#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cdmgen/errors.hpp"
#include "cdmgen/io.hpp"
#include "cdmgen/population.hpp"
#include "cdmgen/tle.hpp"

#ifndef CDMGEN_VERSION
#define CDMGEN_VERSION "0.0.0"
#endif

namespace cdmgen::cli {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  return out;
}

std::string event_file_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "event_%06zu", i);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Json dataset_notes(const scenario::ScenarioConfig& c) {
  return Json{{"mean_motion_units", "rev/day (sites); rad/s also in truth sidecars"},
              {"element_dependence", "independent marginals"},
              {"screening", "performed on ground-truth trajectories"},
              {"propagator", "analytic Keplerian with J2 secular rates and linear drag decay"},
              {"radiation_pressure", "not modelled"},
              {"bstar", "sampled from its own prior as a latent site"},
              {"likelihood_states", "object states stored in the conditioned CDM record"},
              {"window_days", c.window_days},
              {"threshold_km", c.threshold_km}};
}

}  // namespace

scenario::ScenarioConfig resolve_config(const ConfigOptions& options) {
  scenario::ScenarioConfig c = options.config_path.empty() ? scenario::ScenarioConfig{}
                                                           : io::load_config(options.config_path);
  if (options.threshold_km) c.threshold_km = *options.threshold_km;
  if (options.cadence_h) c.cadence_s = *options.cadence_h * 3600.0;
  scenario::validate(c);
  return c;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const DegeneratePosterior& e) {
    err << "degenerate posterior: " << e.what() << '\n';
    return kExitDegeneratePosterior;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const RejectionCapExceeded& e) {
    err << "attempt cap exhausted: " << e.what() << '\n';
    return kExitCapExhausted;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

// ---- generate ----

int cmd_generate(const GenerateArgs& args, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const auto config = resolve_config(args.config);
  if (args.n_events == 0) throw std::invalid_argument("--n-events must be at least 1");
  fs::create_directories(args.out_dir);
  fs::remove(fs::path(args.out_dir) / "manifest.json");

  const std::string hash = io::config_hash(config);
  const std::string dataset_id = "ds-" + io::hex64(io::fnv1a64(hash + ":" + std::to_string(args.seed)));
  io::save_config((fs::path(args.out_dir) / "config.json").string(), config);

  struct Slot {
    bool ok = false;
    std::size_t attempts = 0;
    std::string error;
  };
  std::vector<Slot> slots(args.n_events);
  const RandomStream master(args.seed);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < args.n_events; i = next++) {
      RandomStream rng = master.derive(i);
      try {
        auto result = scenario::rejection_sample_conjunction(config, rng, args.max_attempts);
        const std::string stem = event_file_stem(i);
        result.event.series.event_id = dataset_id + "-" + stem.substr(6);
        const fs::path dir(args.out_dir);
        {
          auto out = open_out((dir / (stem + ".cdm.jsonl")).string());
          io::write_cdm_series(out, result.event.series);
        }
        {
          auto out = open_out((dir / (stem + ".cdm.csv")).string());
          io::write_cdm_csv(out, result.event.series);
        }
        {
          auto out = open_out((dir / (stem + ".truth.json")).string());
          io::TruthMetadata meta;
          meta.attempts = result.attempts;
          meta.seed = args.seed;
          io::write_ground_truth(out, result.event.series.event_id, result.event.event, meta);
        }
        slots[i].ok = true;
        slots[i].attempts = result.attempts;
        std::lock_guard lock(log_mutex);
        log << "event " << i << ": " << result.event.series.records.size() << " CDMs after " << result.attempts
            << " attempts\n";
      } catch (const RejectionCapExceeded& e) {
        slots[i].attempts = e.attempts();
        slots[i].error = e.what();
        std::lock_guard lock(log_mutex);
        log << "event " << i << " skipped: " << e.what() << '\n';
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(args.workers, 1, args.n_events);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::size_t succeeded = 0, attempts = 0;
  Json failures = Json::array();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    attempts += slots[i].attempts;
    if (slots[i].ok) {
      ++succeeded;
    } else {
      failures.push_back({{"event", i}, {"error", slots[i].error}});
    }
  }
  const Json manifest{{"FORMAT", "cdmgen-manifest"},
                      {"VERSION", io::kFormatVersion},
                      {"dataset_id", dataset_id},
                      {"config_hash", hash},
                      {"master_seed", args.seed},
                      {"event_count", succeeded},
                      {"requested_events", args.n_events},
                      {"total_attempts", attempts},
                      {"conjunction_rate_per_attempt",
                       attempts > 0 ? static_cast<double>(succeeded) / static_cast<double>(attempts) : 0.0},
                      {"failures", failures},
                      {"generation_wall_time_s", seconds_since(start)},
                      {"tool_version", CDMGEN_VERSION},
                      {"notes", dataset_notes(config)}};
  {
    const fs::path tmp = fs::path(args.out_dir) / "manifest.json.tmp";
    auto out = open_out(tmp.string());
    out << manifest.dump(2) << '\n';
    out.close();
    fs::rename(tmp, fs::path(args.out_dir) / "manifest.json");
  }
  log << succeeded << "/" << args.n_events << " events written to " << args.out_dir << '\n';
  return succeeded == args.n_events ? kExitOk : kExitCapExhausted;
}

// ---- simulate ----

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  const auto config = resolve_config(args.config);
  RandomStream rng(args.seed);
  scenario::GenerationOutcome outcome;
  std::size_t attempts = 1;
  if (args.max_attempts <= 1) {
    outcome = scenario::generate_event(config, rng);
  } else {
    auto r = scenario::rejection_sample_conjunction(config, rng, args.max_attempts);
    attempts = r.attempts;
    outcome = std::move(r.event);
  }
  if (const auto* none = std::get_if<scenario::NoConjunction>(&outcome)) {
    out << "outcome: no_conjunction (" << none->reason << ")\n";
    return kExitNoConjunction;
  }
  if (const auto* fail = std::get_if<scenario::GenerationFailure>(&outcome)) {
    out << "outcome: generation_failure (" << fail->reason << ")\n";
    return kExitFailure;
  }
  auto generated = std::get<scenario::GeneratedEvent>(std::move(outcome));
  generated.series.event_id = "sim-" + std::to_string(args.seed);
  const auto& ev = generated.event;
  const auto report_object = [&](const char* name, const astro::OrbitalElements& el) {
    out << name << ": mean_motion=" << el.mean_motion_rev_per_day() << " rev/day a=" << el.semi_major_axis
        << " km e=" << el.eccentricity << " i=" << el.inclination * astro::constants::kRadToDeg
        << " deg raan=" << el.raan * astro::constants::kRadToDeg
        << " deg argp=" << el.arg_perigee * astro::constants::kRadToDeg
        << " deg M=" << el.mean_anomaly * astro::constants::kRadToDeg << " deg bstar=" << el.bstar << '\n';
  };
  out.precision(10);
  out << "outcome: conjunction\n";
  out << "attempts: " << attempts << '\n';
  out << "tca_s: " << ev.tca.seconds << '\n';
  out << "miss_distance_km: " << ev.miss_distance << '\n';
  out << "relative_speed_km_s: " << ev.relative_speed << '\n';
  out << "close_approaches: " << generated.close_approaches << '\n';
  out << "cdm_count: " << generated.series.records.size() << '\n';
  report_object("target", ev.target_elements);
  report_object("chaser", ev.chaser_elements);

  if (!args.trace_out.empty()) {
    if (!(args.trace_step_s > 0.0)) throw std::invalid_argument("--trace-step-s must be positive");
    const auto window = config.window();
    const auto target = prop::propagate_ephemeris(ev.target_elements, window.start, window.end, args.trace_step_s,
                                                  config.propagator);
    const auto chaser = prop::propagate_ephemeris(ev.chaser_elements, window.start, window.end, args.trace_step_s,
                                                  config.propagator);
    auto f = open_out(args.trace_out);
    f << "# FORMAT=cdmgen-orbit-trace VERSION=1 TCA_S=" << io::format_number(ev.tca.seconds) << '\n';
    f << "T_S,TARGET_X_KM,TARGET_Y_KM,TARGET_Z_KM,CHASER_X_KM,CHASER_Y_KM,CHASER_Z_KM\n";
    for (std::size_t k = 0; k < target.size(); ++k) {
      f << io::format_number(target[k].epoch.seconds);
      for (int a = 0; a < 3; ++a) f << ',' << io::format_number(target[k].position[a]);
      for (int a = 0; a < 3; ++a) f << ',' << io::format_number(chaser[k].position[a]);
      f << '\n';
    }
    out << "orbit_trace_rows: " << target.size() << '\n';
  }
  if (!args.cdm_out.empty()) {
    auto f = open_out(args.cdm_out);
    io::write_cdm_series(f, generated.series);
  }
  return kExitOk;
}

// ---- infer ----

bool is_angle_site(const std::string& site) {
  for (const char* suffix : {"/raan", "/arg_perigee", "/mean_anomaly"}) {
    const std::string s(suffix);
    if (site.size() >= s.size() && site.compare(site.size() - s.size(), s.size(), s) == 0) return true;
  }
  return false;
}

std::vector<SiteRatio> variance_ratios(const ppl::WeightedPosterior& posterior, const std::vector<std::string>& sites) {
  const auto w = ppl::normalized_weights(posterior);
  const double n = static_cast<double>(posterior.size());
  std::vector<SiteRatio> out;
  for (const auto& site : sites) {
    const bool angle = is_angle_site(site);
    // angle sites: circular variance 1 - |mean resultant|
    double u_a = 0, u_b = 0, w_a = 0, w_b = 0;
    for (std::size_t i = 0; i < posterior.size(); ++i) {
      const double x = posterior.traces[i].value(site).value_or(std::nan(""));
      if (std::isnan(x)) continue;
      const double a = angle ? std::cos(x) : x;
      const double b = angle ? std::sin(x) : x * x;
      u_a += a / n;
      u_b += b / n;
      w_a += w[i] * a;
      w_b += w[i] * b;
    }
    SiteRatio r{site, 0, 0, 0};
    if (angle) {
      r.proposal_variance = 1.0 - std::hypot(u_a, u_b);
      r.posterior_variance = 1.0 - std::hypot(w_a, w_b);
    } else {
      r.proposal_variance = std::max(0.0, u_b - u_a * u_a) * n / std::max(1.0, n - 1.0);
      r.posterior_variance = std::max(0.0, w_b - w_a * w_a);
    }
    r.ratio = r.proposal_variance > 0 ? r.posterior_variance / r.proposal_variance : std::nan("");
    out.push_back(r);
  }
  return out;
}

int cmd_infer(const InferArgs& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  auto config = resolve_config(args.config);
  if (!(args.sigma_scale > 0.0)) throw std::invalid_argument("--sigma-scale must be positive");
  config.likelihood_sigmas = config.likelihood_sigmas.scaled(args.sigma_scale);
  const auto series = io::read_cdm_file(args.cdm_path);
  if (series.records.empty()) throw ParseError("CDM file contains no records");

  RandomStream rng(args.seed);
  const auto posterior =
      scenario::infer_event(series, config, args.n_samples, rng, args.conditioning, args.workers);
  const double runtime = seconds_since(start);
  const double ess = ppl::effective_sample_size(posterior);
  std::size_t finite = 0;
  for (double lw : posterior.log_weights) finite += std::isfinite(lw) ? 1 : 0;
  const auto sites = scenario::latent_sites();
  const auto ratios = variance_ratios(posterior, sites);

  std::string condition;
  switch (args.conditioning.kind) {
    case scenario::Conditioning::Kind::First:
      condition = "first";
      break;
    case scenario::Conditioning::Kind::Index:
      condition = "index " + std::to_string(args.conditioning.index);
      break;
    case scenario::Conditioning::Kind::All:
      condition = "all";
      break;
  }

  io::PosteriorHeader header;
  header.numbers = {{"ESS", ess},
                    {"FINITE_WEIGHTS", static_cast<double>(finite)},
                    {"LOG_NORMALIZER", posterior.log_normalizer},
                    {"SEED", static_cast<double>(args.seed)},
                    {"RUNTIME_S", runtime},
                    {"SIGMA_TCA_S", config.likelihood_sigmas.tca_s},
                    {"SIGMA_SEMI_MAJOR_AXIS_KM", config.likelihood_sigmas.semi_major_axis_km},
                    {"SIGMA_ECCENTRICITY", config.likelihood_sigmas.eccentricity},
                    {"SIGMA_INCLINATION_RAD", config.likelihood_sigmas.inclination_rad}};
  header.texts = {{"EVENT_ID", series.event_id}, {"CONDITION_ON", condition}, {"MEAN_MOTION_UNITS", "rev/day"}};
  if (!args.out.empty()) {
    auto f = open_out(args.out);
    io::write_posterior(f, posterior, sites, header);
    Json diag{{"FORMAT", "cdmgen-inference-diagnostics"},
              {"VERSION", io::kFormatVersion},
              {"n_samples", args.n_samples},
              {"finite_weights", finite},
              {"ess", ess},
              {"runtime_s", runtime},
              {"condition_on", condition}};
    for (const auto& r : ratios) {
      diag["variance_ratios"][r.site] = std::isfinite(r.ratio) ? Json(r.ratio) : Json(nullptr);
    }
    auto d = open_out(args.out + ".diagnostics.json");
    d << diag.dump(2) << '\n';
  }

  out << "samples: " << args.n_samples << "\nfinite_weights: " << finite << "\ness: " << ess
      << "\nruntime_s: " << runtime << "\nvariance_ratio (posterior/proposal):\n";
  for (const auto& r : ratios) out << "  " << r.site << ": " << r.ratio << '\n';
  return kExitOk;
}

// ---- calibration ----

int cmd_calibrate(const CalibrateArgs& args, std::ostream& out) {
  const auto config = resolve_config(args.config);
  std::ifstream in(args.reference_path);
  if (!in) throw ParseError("cannot open " + args.reference_path);
  const auto reference = io::read_reference_covariances(in);
  RandomStream rng(args.seed);
  scenario::CalibrationOptions options;
  options.events = args.events;
  const auto result = scenario::calibrate_sensors(reference, config, rng, options);

  auto updated = config;
  updated.target_sensor = result.target_sensor;
  updated.chaser_sensor = result.chaser_sensor;
  io::save_config(args.out_config, updated);

  Json report{{"FORMAT", "cdmgen-calibration-report"},
              {"VERSION", io::kFormatVersion},
              {"target_scale", result.target_scale},
              {"chaser_scale", result.chaser_scale},
              {"initial_objective", result.initial_objective},
              {"objective", result.objective},
              {"evaluations", result.evaluations},
              {"warning", result.warning},
              {"warning_text", result.warning_text},
              {"quantile_levels", {0.05, 0.25, 0.5, 0.75, 0.95}}};
  for (const auto& [name, rows] : {std::pair{"target", &result.report.target}, std::pair{"chaser", &result.report.chaser}}) {
    for (const auto& q : *rows) {
      report["quantiles"][name][q.entry] = {{"simulated", q.simulated}, {"reference", q.reference}};
    }
  }
  auto f = open_out(args.report_path.empty() ? args.out_config + ".report.json" : args.report_path);
  f << report.dump(2) << '\n';

  out << "target_scale: " << result.target_scale << "\nchaser_scale: " << result.chaser_scale
      << "\nobjective: " << result.initial_objective << " -> " << result.objective << '\n';
  if (result.warning) out << "warning: " << result.warning_text << '\n';
  return kExitOk;
}

int cmd_reference_covariances(const ReferenceArgs& args, std::ostream& out) {
  const auto config = resolve_config(args.config);
  RandomStream rng(args.seed);
  scenario::CalibrationOptions options;
  options.events = args.events;
  const auto rows = scenario::simulate_covariances(config, rng, args.target_scale, args.chaser_scale, options);
  auto f = open_out(args.out);
  io::write_reference_covariances(f, rows);
  out << rows.size() << " covariance rows written to " << args.out << '\n';
  return kExitOk;
}

// ---- plot data ----

int cmd_histogram(const HistogramArgs& args, std::ostream& out) {
  std::ifstream in(args.posterior_path);
  if (!in) throw ParseError("cannot open " + args.posterior_path);
  const auto samples = io::read_posterior(in);
  auto proposal = samples;
  std::fill(proposal.log_weights.begin(), proposal.log_weights.end(), 0.0);

  std::ofstream file;
  if (!args.out.empty()) file = open_out(args.out);
  std::ostream& sink = args.out.empty() ? out : file;
  sink << "# FORMAT=cdmgen-histogram VERSION=1\nSITE,BIN_LOWER,BIN_UPPER,POSTERIOR_MASS,PROPOSAL_MASS\n";
  const auto& sites = args.sites.empty() ? samples.sites : args.sites;
  for (const auto& site : sites) {
    const auto post = io::posterior_histogram(samples, site, args.bins);
    // proposal histogram on the same edges
    std::vector<double> prop_mass(args.bins, 0.0);
    const auto col = static_cast<std::size_t>(std::find(samples.sites.begin(), samples.sites.end(), site) -
                                              samples.sites.begin());
    const double lo = post.edges.front(), hi = post.edges.back();
    for (const auto& row : samples.values) {
      const double v = row[col];
      if (std::isnan(v) || v < lo || v > hi) continue;
      const auto k = std::min(args.bins - 1, static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(args.bins)));
      prop_mass[k] += 1.0 / static_cast<double>(samples.values.size());
    }
    for (std::size_t k = 0; k < args.bins; ++k) {
      sink << site << ',' << io::format_number(post.edges[k]) << ',' << io::format_number(post.edges[k + 1]) << ','
           << io::format_number(post.masses[k]) << ',' << io::format_number(prop_mass[k]) << '\n';
    }
  }
  return kExitOk;
}

int cmd_fit_prior(const FitPriorArgs& args, std::ostream& out) {
  const auto file = population::read_tle_file(args.tle_path, args.strict);
  for (const auto& issue : file.skipped) out << "skipped line " << issue.line_number << ": " << issue.message << '\n';
  population::BinningPolicy policy;
  policy.bins = args.bins;
  const auto prior = population::fit_prior(file.records, policy);
  const std::string text = io::prior_to_json(prior);
  if (args.out.empty()) {
    out << text;
  } else {
    auto f = open_out(args.out);
    f << text;
    out << file.records.size() << " records fitted; prior written to " << args.out << '\n';
  }
  return kExitOk;
}

int cmd_default_config(const std::string& out_path, std::ostream& out) {
  const std::string text = io::config_to_json(scenario::ScenarioConfig{});
  if (out_path.empty()) {
    out << text;
  } else {
    auto f = open_out(out_path);
    f << text;
  }
  return kExitOk;
}

}  // namespace cdmgen::cli
