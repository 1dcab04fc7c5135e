#include "cdmgen/ppl.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "cdmgen/errors.hpp"
#include "cdmgen/numerics.hpp"

namespace cdmgen::ppl {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

const TraceEntry* Trace::find(std::string_view lexical_id, std::size_t instance) const {
  for (const auto& e : entries) {
    if (e.address.instance == instance && e.address.lexical_id == lexical_id) return &e;
  }
  return nullptr;
}

std::optional<double> Trace::value(std::string_view lexical_id, std::size_t instance) const {
  const TraceEntry* e = find(lexical_id, instance);
  if (e == nullptr) return std::nullopt;
  if (const double* v = std::get_if<double>(&e->value)) return *v;
  return std::nullopt;
}

Context::Context(Mode mode, const ObservationSet* observations, RandomStream latent, RandomStream auxiliary)
    : mode_(mode), observations_(observations), latent_(latent), auxiliary_(auxiliary) {
  if (mode_ == Mode::Conditioned && observations_ == nullptr) {
    throw std::invalid_argument("conditioned run needs an observation set");
  }
}

double Context::sample(std::string_view lexical_id, const dist::Distribution& d) {
  auto [it, inserted] = instance_counts_.try_emplace(std::string(lexical_id), 0);
  const std::size_t instance = it->second++;
  const double x = dist::sample(d, latent_);
  const double lp = dist::log_density(d, x);
  trace_.entries.push_back({Address{std::string(lexical_id), instance}, x, lp});
  trace_.log_prior += lp;
  return x;
}

std::vector<double> Context::sample_vector(std::string_view lexical_id, const dist::Distribution& d,
                                           std::size_t count) {
  auto [it, inserted] = instance_counts_.try_emplace(std::string(lexical_id), 0);
  const std::size_t instance = it->second++;
  std::vector<double> xs(count);
  double lp = 0.0;
  for (auto& x : xs) {
    x = dist::sample(d, latent_);
    lp += dist::log_density(d, x);
  }
  trace_.entries.push_back({Address{std::string(lexical_id), instance}, xs, lp});
  trace_.log_prior += lp;
  return xs;
}

double Context::observe(std::string_view name, const dist::Distribution& d) {
  if (trace_.rejected) return std::numeric_limits<double>::quiet_NaN();
  if (++observed_names_[std::string(name)] > 1) {
    throw StructuralMismatch("observation '" + std::string(name) + "' emitted more than once");
  }
  double y;
  if (mode_ == Mode::Prior) {
    y = dist::sample(d, latent_);
  } else {
    const auto it = observations_->find(name);
    if (it == observations_->end()) {
      throw StructuralMismatch("observation '" + std::string(name) + "' is not in the conditioning set");
    }
    const double* v = std::get_if<double>(&it->second);
    if (v == nullptr) throw StructuralMismatch("observation '" + std::string(name) + "' is not scalar");
    y = *v;
  }
  const double ll = dist::log_density(d, y);
  trace_.observations.push_back({std::string(name), y, ll});
  trace_.log_likelihood += ll;
  return y;
}

void Context::reject(std::string reason) {
  if (trace_.rejected) return;
  trace_.rejected = true;
  trace_.rejection_reason = std::move(reason);
  trace_.log_likelihood = kNegInf;
}

Trace Context::finish() {
  if (mode_ == Mode::Conditioned && !trace_.rejected) {
    for (const auto& [name, value] : *observations_) {
      if (!observed_names_.contains(name)) {
        throw StructuralMismatch("conditioned observation '" + name + "' was never emitted by the model");
      }
    }
  }
  return std::move(trace_);
}

Trace run_model_on(const Model& model, Mode mode, const ObservationSet* observations, const RandomStream& stream) {
  Context ctx(mode, observations, stream.derive(0), stream.derive(1));
  model(ctx);
  return ctx.finish();
}

Trace run_model(const Model& model, Mode mode, const ObservationSet* observations, RandomStream& rng) {
  return run_model_on(model, mode, observations, rng.fork());
}

WeightedPosterior make_posterior(std::vector<Trace> traces) {
  WeightedPosterior p;
  p.traces = std::move(traces);
  p.log_weights.reserve(p.traces.size());
  for (const auto& t : p.traces) p.log_weights.push_back(t.log_likelihood);
  p.log_normalizer = numerics::log_sum_exp(p.log_weights);
  if (!std::isfinite(p.log_normalizer)) {
    std::size_t rejected = 0;
    for (const auto& t : p.traces) rejected += t.rejected ? 1 : 0;
    throw DegeneratePosterior("all " + std::to_string(p.traces.size()) + " importance weights are zero (" +
                              std::to_string(rejected) +
                              " traces rejected); increase the sample count or widen the likelihood sigmas");
  }
  return p;
}

WeightedPosterior importance_sample(const Model& model, const ObservationSet& observations, std::size_t n,
                                    RandomStream& rng, std::size_t workers) {
  if (n == 0) throw std::invalid_argument("importance_sample: n must be at least 1");
  const RandomStream base = rng.fork();
  std::vector<Trace> traces(n);
  std::vector<std::exception_ptr> errors(n);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        traces[i] = run_model_on(model, Mode::Conditioned, &observations, base.derive(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, n);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return make_posterior(std::move(traces));
}

std::vector<double> normalized_weights(const WeightedPosterior& p) {
  std::vector<double> w(p.log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(p.log_weights[i] - p.log_normalizer);
  return w;
}

double posterior_expectation(const WeightedPosterior& p, const std::function<double(const Trace&)>& f) {
  if (!std::isfinite(p.log_normalizer)) throw DegeneratePosterior("posterior has no finite weight");
  double acc = 0.0, total = 0.0;
  for (std::size_t i = 0; i < p.traces.size(); ++i) {
    if (p.log_weights[i] == kNegInf) continue;
    const double w = std::exp(p.log_weights[i] - p.log_normalizer);
    acc += w * f(p.traces[i]);
    total += w;
  }
  // Dividing by the summed weights keeps f == 1 at exactly 1.
  return acc / total;
}

double effective_sample_size(const WeightedPosterior& p) {
  if (!std::isfinite(p.log_normalizer)) throw DegeneratePosterior("posterior has no finite weight");
  double sum = 0.0, sum_sq = 0.0;
  for (double w : normalized_weights(p)) {
    sum += w;
    sum_sq += w * w;
  }
  return sum * sum / sum_sq;
}

WeightedHistogram posterior_marginal(const WeightedPosterior& p, std::string_view lexical_id, std::size_t instance,
                                     std::size_t bins) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < p.traces.size(); ++i) {
    if (p.log_weights[i] == kNegInf) continue;
    if (const auto v = p.traces[i].value(lexical_id, instance)) {
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
  }
  if (lo > hi) throw std::invalid_argument("site '" + std::string(lexical_id) + "' is absent from the posterior");
  // A spread at the width of a point-mass histogram bin is one value: centre it in a single bin.
  const double spread = hi - lo;
  if (spread <= std::max(std::max(std::abs(lo), std::abs(hi)) * 1e-5, 1e-12)) {
    const double width = 2.0 * std::max(spread, std::max(std::abs(lo) * 1e-9, 1e-12));
    const double lower = lo - 0.5 * (width - spread) - static_cast<double>(bins / 2) * width;
    return posterior_marginal(p, lexical_id, instance, bins, lower, lower + static_cast<double>(bins) * width);
  }
  return posterior_marginal(p, lexical_id, instance, bins, lo, hi);
}

WeightedHistogram posterior_marginal(const WeightedPosterior& p, std::string_view lexical_id, std::size_t instance,
                                     std::size_t bins, double lower, double upper) {
  if (bins == 0 || !(upper > lower)) throw std::invalid_argument("posterior_marginal: bad binning");
  WeightedHistogram h;
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    h.edges[k] = lower + (upper - lower) * static_cast<double>(k) / static_cast<double>(bins);
  }
  h.masses.assign(bins, 0.0);
  bool found = false;
  for (std::size_t i = 0; i < p.traces.size(); ++i) {
    const auto v = p.traces[i].value(lexical_id, instance);
    if (!v) continue;
    found = true;
    if (p.log_weights[i] == kNegInf || *v < lower || *v > upper) continue;
    auto k = static_cast<std::size_t>((*v - lower) / (upper - lower) * static_cast<double>(bins));
    k = std::min(k, bins - 1);
    h.masses[k] += std::exp(p.log_weights[i] - p.log_normalizer);
  }
  if (!found) throw std::invalid_argument("site '" + std::string(lexical_id) + "' is absent from the posterior");
  return h;
}

}  // namespace cdmgen::ppl
