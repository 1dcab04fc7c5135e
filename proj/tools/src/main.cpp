#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

namespace {

using namespace cdmgen::cli;

void add_config_options(CLI::App* cmd, ConfigOptions& c) {
  cmd->add_option("--config", c.config_path, "scenario configuration file (JSON)");
  cmd->add_option("--threshold-km", c.threshold_km, "screening threshold override");
  cmd->add_option("--cadence-h", c.cadence_h, "CDM cadence override in hours");
}

cdmgen::scenario::Conditioning parse_condition(const std::string& text) {
  if (text == "first") return cdmgen::scenario::Conditioning::first();
  if (text == "all") return cdmgen::scenario::Conditioning::all();
  std::string index = text;
  if (index.rfind("index", 0) == 0) index = index.substr(5);
  const auto start = index.find_first_not_of(" :=");
  if (start == std::string::npos) throw CLI::ValidationError("--condition-on", "expected first, all or index K");
  return cdmgen::scenario::Conditioning::record(std::stoul(index.substr(start)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic conjunction data message generator and event inference"};
  app.require_subcommand(1);
  std::function<int()> run;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "generate a dataset of conjunction events");
  add_config_options(g, gen.config);
  g->add_option("--n-events", gen.n_events, "number of events")->required();
  g->add_option("--seed", gen.seed, "master seed");
  g->add_option("--out", gen.out_dir, "output directory")->required();
  g->add_option("--workers", gen.workers, "worker threads");
  g->add_option("--max-attempts", gen.max_attempts, "rejection attempts per event");
  g->callback([&] { run = [&] { return cmd_generate(gen, std::cerr); }; });

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run the generative model once and report the event");
  add_config_options(s, sim.config);
  s->add_option("--seed", sim.seed, "seed");
  s->add_option("--trace-out", sim.trace_out, "orbit trace CSV path");
  s->add_option("--trace-step-s", sim.trace_step_s, "orbit trace step in seconds");
  s->add_option("--out", sim.cdm_out, "CDM series output path");
  s->add_option("--max-attempts", sim.max_attempts, "retry until a conjunction, up to this many attempts");
  s->callback([&] { run = [&] { return cmd_simulate(sim, std::cout); }; });

  InferArgs inf;
  std::string condition = "first";
  auto* i = app.add_subcommand("infer", "posterior inference conditioned on a CDM series");
  add_config_options(i, inf.config);
  i->add_option("cdm", inf.cdm_path, "CDM series file (JSONL)")->required();
  i->add_option("--n-samples", inf.n_samples, "importance samples");
  i->add_option("--seed", inf.seed, "seed");
  i->add_option("--out", inf.out, "posterior dump path");
  i->add_option("--workers", inf.workers, "worker threads");
  i->add_option("--condition-on", condition, "first | all | index K");
  i->add_option("--sigma-scale", inf.sigma_scale, "multiplier on all likelihood sigmas");
  i->callback([&] {
    inf.conditioning = parse_condition(condition);
    run = [&] { return cmd_infer(inf, std::cout); };
  });

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "scale sensor noise to match reference TCA covariances");
  add_config_options(c, cal.config);
  c->add_option("reference", cal.reference_path, "reference covariance file")->required();
  c->add_option("--out", cal.out_config, "calibrated config path")->required();
  c->add_option("--report", cal.report_path, "calibration report path");
  c->add_option("--seed", cal.seed, "seed");
  c->add_option("--n-events", cal.events, "events simulated per evaluation");
  c->callback([&] { run = [&] { return cmd_calibrate(cal, std::cout); }; });

  ReferenceArgs ref;
  auto* r = app.add_subcommand("reference-covariances", "write model TCA covariances as a reference file");
  add_config_options(r, ref.config);
  r->add_option("--out", ref.out, "output path")->required();
  r->add_option("--seed", ref.seed, "seed");
  r->add_option("--n-events", ref.events, "events");
  r->add_option("--target-scale", ref.target_scale, "target noise scale");
  r->add_option("--chaser-scale", ref.chaser_scale, "chaser noise scale");
  r->callback([&] { run = [&] { return cmd_reference_covariances(ref, std::cout); }; });

  HistogramArgs hist;
  auto* h = app.add_subcommand("histogram", "weighted marginal histograms from a posterior dump");
  h->add_option("posterior", hist.posterior_path, "posterior dump")->required();
  h->add_option("--site", hist.sites, "site name (repeatable)");
  h->add_option("--bins", hist.bins, "bin count");
  h->add_option("--out", hist.out, "output CSV path");
  h->callback([&] { run = [&] { return cmd_histogram(hist, std::cout); }; });

  FitPriorArgs fit;
  auto* f = app.add_subcommand("fit-prior", "fit histogram priors from a TLE catalog");
  f->add_option("tle", fit.tle_path, "TLE file")->required();
  f->add_option("--bins", fit.bins, "bins per element");
  f->add_flag("--strict", fit.strict, "abort on the first bad record");
  f->add_option("--out", fit.out, "prior output path");
  f->callback([&] { run = [&] { return cmd_fit_prior(fit, std::cout); }; });

  std::string default_out;
  auto* d = app.add_subcommand("default-config", "print the built-in configuration");
  d->add_option("--out", default_out, "output path");
  d->callback([&] { run = [&] { return cmd_default_config(default_out, std::cout); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return guarded(std::cerr, run);
}
