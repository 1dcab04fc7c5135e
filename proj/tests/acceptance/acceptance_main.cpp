// Acceptance runner: one PASS/FAIL line per criterion.

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "cdmgen/astro.hpp"
#include "cdmgen/cdm.hpp"
#include "cdmgen/conjunction.hpp"
#include "cdmgen/io.hpp"
#include "cdmgen/numerics.hpp"
#include "cdmgen/ppl.hpp"
#include "cdmgen/propagation.hpp"
#include "cdmgen/scenario.hpp"
#include "commands.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace cdmgen;
using astro::Epoch;
using Json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Env {
  fs::path work_dir;
};

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(double x, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const Env& env, const std::string& name) {
  const auto dir = env.work_dir / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---- 1: two-body propagation vs RK4 ----

Outcome criterion_1(const Env&) {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  const prop::PropagatorSpec spec{prop::PropagatorKind::TwoBody};
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto el = oracle::random_leo(rng, 0.05);
    const auto s0 = astro::elements_to_state(el);
    const double steps = std::round(el.period());
    const auto rk = oracle::rk4_two_body({s0.position, s0.velocity}, steps, 1.0);
    const auto lib = prop::propagate(el, Epoch(steps), spec);
    worst = std::max(worst, (lib.position - rk.r).norm());
  }
  const double runtime = elapsed(start);
  return {worst <= 1e-3 && runtime < 30.0,
          "max position error " + fmt(worst) + " km over 50 orbits (limit 1e-3), runtime " + fmt(runtime) +
              " s (limit 30)"};
}

// ---- 2: round trips and Kepler residual ----

Outcome criterion_2(const Env&) {
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double re = astro::constants::kEarthRadius;
  double worst_a = 0.0, worst_e = 0.0, worst_i = 0.0, worst_angle = 0.0;
  int done = 0;
  while (done < 10000) {
    astro::OrbitalElements el;
    el.semi_major_axis = re + 200.0 + (45000.0 - re) * u(rng);
    el.eccentricity = 0.9 * u(rng);
    if (el.perigee_radius() < re + 100.0) continue;
    el.inclination = astro::constants::kPi * u(rng);
    el.raan = astro::constants::kTwoPi * u(rng);
    el.arg_perigee = astro::constants::kTwoPi * u(rng);
    el.mean_anomaly = astro::constants::kTwoPi * u(rng);
    const auto back = astro::state_to_elements(astro::elements_to_state(el));
    worst_a = std::max(worst_a, std::abs(back.semi_major_axis / el.semi_major_axis - 1.0));
    worst_e = std::max(worst_e, std::abs(back.eccentricity - el.eccentricity));
    worst_i = std::max(worst_i, std::abs(back.inclination - el.inclination));
    for (auto [x, y] : {std::pair{back.raan, el.raan}, {back.arg_perigee, el.arg_perigee},
                        {back.mean_anomaly, el.mean_anomaly}}) {
      worst_angle = std::max(worst_angle, astro::circular_distance(x, y));
    }
    ++done;
  }
  double worst_residual = 0.0;
  for (int ie = 0; ie <= 99; ++ie) {
    const double e = 0.01 * ie;
    for (int im = 0; im < 629; ++im) {
      const double m = 0.01 * im;
      const double ea = astro::solve_kepler(m, e);
      worst_residual = std::max(worst_residual, std::abs(ea - e * std::sin(ea) - m));
    }
  }
  const double worst_round_trip = std::max({worst_a, worst_e, worst_i, worst_angle});
  return {worst_round_trip <= 1e-10 && worst_residual <= 1e-12,
          "round trip worst: a " + fmt(worst_a) + " (relative), e " + fmt(worst_e) + ", i " + fmt(worst_i) +
              ", angles " + fmt(worst_angle) + " (limit 1e-10); Kepler residual " + fmt(worst_residual) +
              " over e in [0,0.99] x M in [0,2pi) (limit 1e-12)"};
}

// ---- 3: screening completeness ----

Outcome criterion_3(const Env&) {
  const auto start = Clock::now();
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const prop::PropagatorSpec spec;
  const double window_s = 12.0 * 3600.0;
  const conjunction::TimeWindow window{Epoch(0.0), Epoch(window_s)};
  std::size_t truth_count = 0, matched = 0, pairs_with_events = 0;
  double worst_dt = 0.0, worst_dmiss = 0.0;
  std::string first_miss;
  for (int k = 0; k < 200; ++k) {
    const auto target = oracle::random_leo(rng);
    const auto chaser = k < 20 ? oracle::crossing_chaser(target, window_s * (0.05 + 0.9 * u(rng)), spec,
                                                         4.5 * u(rng), 0.1 + 3.0 * u(rng))
                               : oracle::random_leo(rng);
    const auto events = conjunction::screen_pair(target, chaser, window, spec);
    const auto truth =
        oracle::brute_force_minima(conjunction::make_trajectory(target, spec), conjunction::make_trajectory(chaser, spec),
                                   0.0, window_s, 0.1, 5.0 - 0.05);
    pairs_with_events += truth.empty() ? 0 : 1;
    for (const auto& ap : truth) {
      ++truth_count;
      bool ok = false;
      for (const auto& ev : events) {
        const double dt = std::abs(ev.tca.seconds - ap.tca);
        const double dm = std::abs(ev.miss_distance - ap.miss);
        if (dt <= 0.5 && dm <= 1e-3) {
          ok = true;
          worst_dt = std::max(worst_dt, dt);
          worst_dmiss = std::max(worst_dmiss, dm);
        }
      }
      matched += ok ? 1 : 0;
      if (!ok && first_miss.empty()) first_miss = " first unmatched: pair " + std::to_string(k) + " tca " + fmt(ap.tca, 8);
    }
  }
  const double runtime = elapsed(start);
  return {matched == truth_count && truth_count >= 20 && runtime < 300.0,
          std::to_string(matched) + "/" + std::to_string(truth_count) + " brute-force conjunctions matched (" +
              std::to_string(pairs_with_events) + " pairs with conjunctions), worst |dTCA| " + fmt(worst_dt) +
              " s, worst |dmiss| " + fmt(worst_dmiss * 1e3) + " m, runtime " + fmt(runtime) + " s (limit 300)" +
              first_miss};
}

// ---- 4: importance sampling on conjugate models ----

struct ConjugateCase {
  std::string name;
  ppl::Model model;
  ppl::ObservationSet observations;
  double mean;
  double variance;
};

double self_normalized_se(const ppl::WeightedPosterior& p, const std::function<double(const ppl::Trace&)>& f) {
  const double mu = ppl::posterior_expectation(p, f);
  const auto w = ppl::normalized_weights(p);
  double v = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    const double d = f(p.traces[i]) - mu;
    v += w[i] * w[i] * d * d;
  }
  return std::sqrt(v);
}

Outcome criterion_4(const Env&) {
  std::vector<ConjugateCase> cases;
  cases.push_back({"normal-normal",
                   [](ppl::Context& c) {
                     const double x = c.sample("x", dist::Normal{0.0, 1.0, 0.0});
                     c.observe("y", dist::Normal{x, 1.0, 0.0});
                   },
                   {{"y", 1.0}},
                   0.5,
                   0.5});
  {
    const std::vector<double> ys{1.5, 2.7, 3.1};
    ppl::ObservationSet obs;
    for (std::size_t k = 0; k < ys.size(); ++k) obs.emplace("y" + std::to_string(k), ys[k]);
    const double precision = 1.0 / 0.25 + 3.0;
    cases.push_back({"normal-normal (3 obs)",
                     [n = ys.size()](ppl::Context& c) {
                       const double x = c.sample("x", dist::Normal{2.0, 0.5, 0.0});
                       for (std::size_t k = 0; k < n; ++k) c.observe("y" + std::to_string(k), dist::Normal{x, 1.0, 0.0});
                     },
                     obs,
                     (2.0 / 0.25 + (1.5 + 2.7 + 3.1)) / precision,
                     1.0 / precision});
  }
  {
    const std::vector<int> flips{1, 1, 0, 1, 1, 1, 0, 1, 0, 1};
    ppl::ObservationSet obs;
    for (std::size_t k = 0; k < flips.size(); ++k) obs.emplace("flip" + std::to_string(k), double(flips[k]));
    const double a = 1.0 + 7.0, b = 1.0 + 3.0;
    cases.push_back({"beta-bernoulli",
                     [n = flips.size()](ppl::Context& c) {
                       const double p = c.sample("x", dist::Uniform{0.0, 1.0});
                       for (std::size_t k = 0; k < n; ++k) c.observe("flip" + std::to_string(k), dist::Bernoulli{p});
                     },
                     obs,
                     a / (a + b),
                     a * b / ((a + b) * (a + b) * (a + b + 1.0))});
  }

  bool pass = true;
  std::string detail;
  RandomStream rng(4004);
  for (const auto& c : cases) {
    const auto p = ppl::importance_sample(c.model, c.observations, 10000, rng);
    auto x = [](const ppl::Trace& t) { return *t.value("x"); };
    auto sq = [&c](const ppl::Trace& t) {
      const double d = *t.value("x") - c.mean;
      return d * d;
    };
    const double mean = ppl::posterior_expectation(p, x);
    const double var = ppl::posterior_expectation(p, sq);
    const double mean_z = std::abs(mean - c.mean) / self_normalized_se(p, x);
    const double var_z = std::abs(var - c.variance) / self_normalized_se(p, sq);

    const auto w = ppl::normalized_weights(p);
    long double sum = 0.0L, sum_sq = 0.0L;
    for (double wi : w) {
      sum += wi;
      sum_sq += static_cast<long double>(wi) * wi;
    }
    const double ess = ppl::effective_sample_size(p);
    const double ess_direct = static_cast<double>(sum * sum / sum_sq);
    const double norm_err = std::abs(static_cast<double>(sum) - 1.0);
    const double ess_err = std::abs(ess - ess_direct) / ess_direct;
    const double one_err = std::abs(ppl::posterior_expectation(p, [](const ppl::Trace&) { return 1.0; }) - 1.0);
    bool weights_are_likelihoods = true;
    for (std::size_t i = 0; i < p.size(); ++i) weights_are_likelihoods &= p.log_weights[i] == p.traces[i].log_likelihood;
    const bool ok = mean_z <= 3.0 && var_z <= 3.0 && norm_err <= 1e-12 && ess_err <= 1e-12 && one_err <= 1e-12 &&
                    ess >= 1.0 && ess <= 10000.0 && weights_are_likelihoods;
    pass &= ok;
    detail += c.name + ": mean " + fmt(mean, 5) + " vs " + fmt(c.mean, 5) + " (" + fmt(mean_z, 2) + " SE), var " +
              fmt(var, 4) + " vs " + fmt(c.variance, 4) + " (" + fmt(var_z, 2) + " SE), ESS " + fmt(ess, 5) +
              ", |sum w - 1| " + fmt(norm_err, 2) + ", ESS rel err " + fmt(ess_err, 2) + "; ";
  }
  return {pass, detail};
}

// ---- 5: Monte Carlo covariance ----

double min_eigenvalue(const Mat6& m) { return Eigen::SelfAdjointEigenSolver<Mat6>(m).eigenvalues().minCoeff(); }

Outcome criterion_5(const Env&) {
  std::mt19937_64 gen(5005);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const prop::PropagatorSpec spec;
  std::size_t compared = 0, within = 0;
  double worst_z = 0.0;
  double worst_zero = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto el = oracle::random_leo(gen);
    const auto obs = astro::elements_to_state(el);
    const Epoch tca = Epoch::from_days(0.5 + 6.5 * u(gen));
    const auto sensor = k % 2 ? cdm::default_chaser_sensor() : cdm::default_target_sensor();
    RandomStream small_rng(600 + k), large_rng(700 + k), zero_rng(800 + k);
    const auto small = cdm::propagate_uncertainty_mc(obs, sensor, tca, spec, 100, small_rng, el.bstar);
    const auto large = cdm::propagate_uncertainty_mc(obs, sensor, tca, spec, 10000, large_rng, el.bstar);
    // Standard error of the 100-sample estimate, measured from independent replicates.
    std::array<std::array<double, 6>, 6> sum{}, sum_sq{};
    const int replicates = 100;
    for (int r = 0; r < replicates; ++r) {
      RandomStream rep_rng(100000 * (k + 1) + r);
      const Mat6 c = cdm::propagate_uncertainty_mc(obs, sensor, tca, spec, 100, rep_rng, el.bstar).covariance_rtn;
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          sum[i][j] += c(i, j);
          sum_sq[i][j] += c(i, j) * c(i, j);
        }
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double m = sum[i][j] / replicates;
        const double var_small = (sum_sq[i][j] / replicates - m * m) * replicates / (replicates - 1.0);
        const double se = std::sqrt(var_small * (1.0 + 99.0 / 9999.0));
        const double z = std::abs(small.covariance_rtn(i, j) - large.covariance_rtn(i, j)) / se;
        worst_z = std::max(worst_z, z);
        ++compared;
        within += z <= 3.0 ? 1 : 0;
      }
    }
    const auto zero = cdm::propagate_uncertainty_mc(obs, cdm::SensorModel{}, tca, spec, 100, zero_rng, el.bstar);
    worst_zero = std::max(worst_zero, zero.covariance_rtn.cwiseAbs().maxCoeff());
  }

  // Every covariance emitted in CDM series for a set of engineered events.
  std::size_t emitted = 0, psd = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto config = oracle::crossing_scenario(5100 + seed, 7.0);
    RandomStream rng(seed);
    const auto outcome = scenario::generate_event(config, rng);
    if (const auto* ev = std::get_if<scenario::GeneratedEvent>(&outcome)) {
      for (const auto& r : ev->series.records) {
        for (const Mat6* m : {&r.target.covariance_rtn, &r.chaser.covariance_rtn}) {
          ++emitted;
          const bool symmetric = (*m - m->transpose()).cwiseAbs().maxCoeff() == 0.0;
          psd += symmetric && min_eigenvalue(*m) >= -1e-12 * std::max(1.0, m->norm()) ? 1 : 0;
        }
      }
    }
  }
  const bool pass = within == compared && worst_zero == 0.0 && psd == emitted && emitted > 0;
  return {pass, std::to_string(within) + "/" + std::to_string(compared) +
                    " entries within 3 combined SE (worst " + fmt(worst_z) + " SE); zero-noise max |C| " +
                    fmt(worst_zero) + "; " + std::to_string(psd) + "/" + std::to_string(emitted) +
                    " emitted covariances symmetric PSD"};
}

// ---- 6: collision probability ----

Mat6 position_covariance(const Mat3& block) {
  Mat6 c = Mat6::Zero();
  c.topLeftCorner<3, 3>() = block;
  c.bottomRightCorner<3, 3>() = 1e-6 * Mat3::Identity();
  return c;
}

Outcome criterion_6(const Env&) {
  double worst_closed = 0.0;
  for (double sigma : {0.01, 0.05, 0.3, 1.0, 10.0, 100.0}) {
    for (double radius : {0.001, 0.01, 0.1, 1.0}) {
      const auto p = cdm::collision_probability_2d(Vec3::Zero(), Vec3(0.3, -1.0, 7.0),
                                                   position_covariance(sigma * sigma * Mat3::Identity()), radius);
      worst_closed = std::max(worst_closed, std::abs(p.probability + std::expm1(-radius * radius / (2 * sigma * sigma))));
    }
  }
  Mat3 block = Mat3::Zero();
  block.diagonal() << 1.0, 0.04, 0.5;
  const auto aniso =
      cdm::collision_probability_2d(Vec3(0.5, 0.1, 0.0), Vec3(0.0, 0.0, 9.0), position_covariance(block), 0.05);
  const auto mc = oracle::mc_disc_probability(0.5, 0.1, 1.0, 0.2, 0.05, 10'000'000, 6006);
  const double z = std::abs(aniso.probability - mc.value) / mc.standard_error;

  std::size_t grid_points = 0, monotone = 0;
  Mat3 b2 = Mat3::Zero();
  b2.diagonal() << 0.8, 0.1, 0.3;
  const Mat6 cov = position_covariance(b2);
  const Vec3 vel(0.0, 0.0, 12.0);
  for (double dir = 0.0; dir < astro::constants::kPi; dir += 0.5) {
    const Vec3 unit(std::cos(dir), std::sin(dir), 0.0);
    double last = 0.0;
    for (double r = 0.001; r < 2.0; r *= 1.5) {
      const double p = cdm::collision_probability_2d(0.4 * unit, vel, cov, r).probability;
      ++grid_points;
      monotone += p >= last ? 1 : 0;
      last = p;
    }
    last = 1.0;
    for (double s = 0.0; s < 5.0; s += 0.1) {
      const double p = cdm::collision_probability_2d(s * unit, vel, cov, 0.02).probability;
      ++grid_points;
      monotone += p <= last ? 1 : 0;
      last = p;
    }
  }
  return {worst_closed <= 1e-9 && z <= 3.0 && monotone == grid_points,
          "isotropic closed-form worst error " + fmt(worst_closed) + " (limit 1e-9); anisotropic Pc " +
              fmt(aniso.probability, 6) + " vs MC " + fmt(mc.value, 6) + " +- " + fmt(mc.standard_error, 3) + " (" +
              fmt(z, 2) + " SE); monotone " + std::to_string(monotone) + "/" + std::to_string(grid_points)};
}

// ---- 7: posterior contraction on self-generated events ----

Outcome criterion_7(const Env&) {
  const auto start = Clock::now();
  const scenario::ScenarioConfig config;
  const auto& prior = config.prior;
  using population::Element;
  const std::size_t n = 20000;
  const std::size_t bins = 20;
  bool pass = true;
  std::string detail;
  const RandomStream master(7007);
  for (std::size_t k = 0; k < 5; ++k) {
    RandomStream event_rng = master.derive(2 * k);
    const auto truth = scenario::rejection_sample_conjunction(config, event_rng, 2'000'000);
    RandomStream infer_rng = master.derive(2 * k + 1);
    const auto post = scenario::infer_event(truth.event.series, config, n, infer_rng);
    const double ess = ppl::effective_sample_size(post);
    std::size_t finite = 0;
    for (double lw : post.log_weights) finite += std::isfinite(lw) ? 1 : 0;
    auto sorted = post.log_weights;
    std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end(), std::greater<>());

    std::string line = "event " + std::to_string(k) + " (" + std::to_string(truth.event.series.records.size()) +
                       " CDMs, " + std::to_string(finite) + " finite weights, ESS " + fmt(ess) + ", best two log weights " + fmt(sorted[0], 4) + " and " +
                       fmt(sorted[1], 4) + "): ratio";
    for (Element e : {Element::MeanMotion, Element::Eccentricity, Element::Inclination}) {
      const std::string site = scenario::site_name("target", e);
      auto f = [&](const ppl::Trace& t) { return *t.value(site); };
      const double mu = ppl::posterior_expectation(post, f);
      const double var = ppl::posterior_expectation(post, [&](const ppl::Trace& t) {
        const double d = f(t) - mu;
        return d * d;
      });
      const double ratio = var / dist::variance(prior[e]);
      pass &= ratio < 0.9;
      line += " " + std::string(population::element_name(e)) + "=" + fmt(ratio);
    }
    line += "; TV";
    for (Element e : {Element::Raan, Element::ArgPerigee, Element::MeanAnomaly}) {
      const auto h = ppl::posterior_marginal(post, scenario::site_name("target", e), 0, bins, 0.0,
                                             astro::constants::kTwoPi);
      double tv = 0.0;
      for (double m : h.masses) tv += std::abs(m - 1.0 / bins);
      tv *= 0.5;
      pass &= tv < 0.15;
      line += " " + std::string(population::element_name(e)) + "=" + fmt(tv);
    }
    detail += line + "; ";
  }
  const double runtime = elapsed(start);
  pass &= runtime < 1800.0;
  return {pass, detail + "runtime " + fmt(runtime) + " s (limit 1800)"};
}

// ---- 8: CDM series shape ----

Outcome criterion_8(const Env&) {
  const scenario::ScenarioConfig config;
  const RandomStream master(8008);
  std::size_t shortest = 1000, longest = 0, attempts = 0;
  bool ordered = true;
  std::map<std::size_t, int> lengths;
  for (std::size_t i = 0; i < 200; ++i) {
    RandomStream rng = master.derive(i);
    const auto r = scenario::rejection_sample_conjunction(config, rng, 2'000'000);
    attempts += r.attempts;
    const auto& s = r.event.series;
    shortest = std::min(shortest, s.records.size());
    longest = std::max(longest, s.records.size());
    lengths[s.records.size()]++;
    for (std::size_t k = 0; k < s.records.size(); ++k) {
      ordered &= s.records[k].creation_epoch < r.event.event.tca;
      if (k > 0) ordered &= s.records[k].creation_epoch > s.records[k - 1].creation_epoch;
    }
  }
  std::string hist;
  for (const auto& [len, count] : lengths) hist += " " + std::to_string(len) + ":" + std::to_string(count);
  return {shortest <= 16 && longest >= 16 && ordered,
          "lengths span [" + std::to_string(shortest) + ", " + std::to_string(longest) + "], counts" + hist +
              "; records pre-TCA and ordered: " + (ordered ? "yes" : "no") + "; conjunction rate per attempt " +
              fmt(200.0 / static_cast<double>(attempts))};
}

// ---- 9: reproducible dataset generation ----

Outcome criterion_9(const Env& env) {
  const auto root = fresh_dir(env, "criterion_9");
  auto run = [&](const std::string& name) {
    cli::GenerateArgs args;
    args.n_events = 100;
    args.seed = 9009;
    args.workers = 4;
    args.out_dir = (root / name).string();
    std::ostringstream log;
    const auto start = Clock::now();
    const int code = cli::cmd_generate(args, log);
    return std::pair{code, elapsed(start)};
  };
  const auto [code_a, time_a] = run("a");
  const auto [code_b, time_b] = run("b");
  std::size_t files = 0, identical = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    const auto name = e.path().filename();
    ++files;
    if (name == "manifest.json") {
      auto ma = Json::parse(slurp(e.path()));
      auto mb = Json::parse(slurp(root / "b" / name));
      ma.erase("generation_wall_time_s");
      mb.erase("generation_wall_time_s");
      identical += ma == mb ? 1 : 0;
    } else {
      identical += fs::exists(root / "b" / name) && slurp(e.path()) == slurp(root / "b" / name) ? 1 : 0;
    }
  }
  std::size_t files_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(root / "b")) ++files_b;
  const auto manifest = Json::parse(slurp(root / "a" / "manifest.json"));
  const bool pass = code_a == 0 && code_b == 0 && identical == files && files == files_b && time_a < 900.0;
  return {pass, std::to_string(identical) + "/" + std::to_string(files) +
                    " files identical (manifest compared without wall time); generation " + fmt(time_a) + " s and " +
                    fmt(time_b) + " s for 100 events with 4 workers (limit 900); conjunction rate " +
                    fmt(manifest["conjunction_rate_per_attempt"].get<double>())};
}

// ---- 10: calibration closure ----

Outcome criterion_10(const Env& env) {
  const auto root = fresh_dir(env, "criterion_10");
  const auto start = Clock::now();
  std::ostringstream log;
  auto reference = [&](const std::string& name, double scale, std::uint64_t seed) {
    cli::ReferenceArgs args;
    args.out = (root / name).string();
    args.seed = seed;
    args.target_scale = scale;
    args.chaser_scale = scale;
    cli::cmd_reference_covariances(args, log);
    return args.out;
  };
  auto calibrate = [&](const std::string& ref, const std::string& name, std::uint64_t seed) {
    cli::CalibrateArgs args;
    args.reference_path = ref;
    args.out_config = (root / name).string();
    args.seed = seed;
    cli::cmd_calibrate(args, log);
    return Json::parse(slurp(args.out_config + ".report.json"));
  };
  const auto self = calibrate(reference("ref_1.csv", 1.0, 10010), "self.json", 10010);
  const auto doubled = calibrate(reference("ref_2.csv", 2.0, 10010), "scale2.json", 10010);
  const auto independent = calibrate(root / "ref_1.csv", "independent.json", 20020);
  const double st = self["target_scale"], sc = self["chaser_scale"];
  const double dt = doubled["target_scale"], dc = doubled["chaser_scale"];
  const bool pass = std::abs(st - 1.0) <= 0.02 && std::abs(sc - 1.0) <= 0.02 && std::abs(dt / 2.0 - 1.0) <= 0.05 &&
                    std::abs(dc / 2.0 - 1.0) <= 0.05;
  return {pass, "self-calibration scales target " + fmt(st, 5) + ", chaser " + fmt(sc, 5) +
                    " (1 +- 2%); scale-2 reference recovered target " + fmt(dt, 5) + ", chaser " + fmt(dc, 5) +
                    " (2 +- 5%); informational, self-calibration with an independent seed: target " +
                    fmt(independent["target_scale"].get<double>(), 5) + ", chaser " +
                    fmt(independent["chaser_scale"].get<double>(), 5) + "; runtime " + fmt(elapsed(start)) + " s"};
}

const std::vector<std::pair<std::string, std::function<Outcome(const Env&)>>> kCriteria = {
    {"two-body propagation matches RK4", criterion_1},
    {"round trips and Kepler residual", criterion_2},
    {"screening completeness vs 0.1 s brute force", criterion_3},
    {"importance sampling on conjugate posteriors", criterion_4},
    {"Monte Carlo covariance propagation", criterion_5},
    {"collision probability", criterion_6},
    {"posterior contraction on self-generated events", criterion_7},
    {"CDM series shape", criterion_8},
    {"reproducible dataset generation", criterion_9},
    {"calibration closure", criterion_10},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::string work_dir = (fs::temp_directory_path() / "cdmgen_acceptance").string();
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--work-dir", work_dir, "scratch directory");
  CLI11_PARSE(app, argc, argv);

  const Env env{work_dir};
  fs::create_directories(env.work_dir);
  bool all = true;
  for (std::size_t k = 0; k < kCriteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = kCriteria[k].second(env);
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all &= outcome.pass;
    std::cout << "criterion " << k + 1 << " " << (outcome.pass ? "PASS" : "FAIL") << " [" << kCriteria[k].first
              << "] " << outcome.detail << " (" << fmt(elapsed(start)) << " s)" << std::endl;
  }
  return all ? 0 : 1;
}
