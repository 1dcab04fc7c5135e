#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cdmgen/distributions.hpp"
#include "cdmgen/random.hpp"

namespace cdmgen::ppl {

/// A sample statement site and the number of earlier hits of that site in the same run.
struct Address {
  std::string lexical_id;
  std::size_t instance = 0;

  auto operator<=>(const Address&) const = default;
};

using Value = std::variant<double, std::vector<double>>;

struct TraceEntry {
  Address address;
  Value value;
  double log_prior = 0.0;
};

struct ObservationEntry {
  std::string name;
  Value value;
  double log_likelihood = 0.0;
};

struct Trace {
  std::vector<TraceEntry> entries;
  std::vector<ObservationEntry> observations;
  double log_prior = 0.0;
  double log_likelihood = 0.0;
  bool rejected = false;
  std::string rejection_reason;

  const TraceEntry* find(std::string_view lexical_id, std::size_t instance = 0) const;
  /// Scalar value at the site, if present.
  std::optional<double> value(std::string_view lexical_id, std::size_t instance = 0) const;
};

enum class Mode { Prior, Conditioned };

using ObservationSet = std::map<std::string, Value, std::less<>>;

/// Handle passed to a model during one execution.
class Context {
 public:
  Context(Mode mode, const ObservationSet* observations, RandomStream latent, RandomStream auxiliary);

  Mode mode() const { return mode_; }

  double sample(std::string_view lexical_id, const dist::Distribution& d);
  /// Independent draws from `d` recorded as one vector-valued entry.
  std::vector<double> sample_vector(std::string_view lexical_id, const dist::Distribution& d, std::size_t count);

  /// Prior mode draws the value from `d`; conditioned mode looks it up by name.
  /// Either way the value is scored and returned.
  double observe(std::string_view name, const dist::Distribution& d);

  /// Ends the run with zero likelihood; later observe calls are ignored.
  void reject(std::string reason);
  bool rejected() const { return trace_.rejected; }

  /// Stream for nuisance randomness that is not recorded as sample sites.
  RandomStream& auxiliary() { return auxiliary_; }

  /// Checks that every conditioned name was observed exactly once and returns the trace.
  Trace finish();

 private:
  Mode mode_;
  const ObservationSet* observations_;
  RandomStream latent_;
  RandomStream auxiliary_;
  std::map<std::string, std::size_t, std::less<>> instance_counts_;
  std::map<std::string, int, std::less<>> observed_names_;
  Trace trace_;
};

using Model = std::function<void(Context&)>;

/// One execution. The latent and auxiliary streams are sub-streams of `rng.fork()`.
Trace run_model(const Model& model, Mode mode, const ObservationSet* observations, RandomStream& rng);

/// Runs the model on an explicit per-trace stream without forking.
Trace run_model_on(const Model& model, Mode mode, const ObservationSet* observations, const RandomStream& stream);

struct WeightedPosterior {
  std::vector<Trace> traces;
  std::vector<double> log_weights;
  double log_normalizer = 0.0;  // log-sum-exp of log_weights

  std::size_t size() const { return traces.size(); }
};

/// Likelihood weighting with the prior as proposal. Trace i runs on sub-stream i of
/// `rng.fork()`, so results do not depend on `workers`. Throws DegeneratePosterior
/// when every weight is -inf.
WeightedPosterior importance_sample(const Model& model, const ObservationSet& observations, std::size_t n,
                                    RandomStream& rng, std::size_t workers = 1);

/// Builds a posterior from traces, using their log-likelihoods as log-weights.
WeightedPosterior make_posterior(std::vector<Trace> traces);

std::vector<double> normalized_weights(const WeightedPosterior& p);

double posterior_expectation(const WeightedPosterior& p, const std::function<double(const Trace&)>& f);

/// (sum w)^2 / sum w^2 over normalized weights.
double effective_sample_size(const WeightedPosterior& p);

struct WeightedHistogram {
  std::vector<double> edges;
  std::vector<double> masses;
};

/// Weighted histogram of a scalar site over `bins` equal-width bins spanning the
/// values seen in finite-weight traces. A spread below 1e-5 relative counts as a
/// single value and lands in one bin.
WeightedHistogram posterior_marginal(const WeightedPosterior& p, std::string_view lexical_id, std::size_t instance,
                                     std::size_t bins);
WeightedHistogram posterior_marginal(const WeightedPosterior& p, std::string_view lexical_id, std::size_t instance,
                                     std::size_t bins, double lower, double upper);

}  // namespace cdmgen::ppl
