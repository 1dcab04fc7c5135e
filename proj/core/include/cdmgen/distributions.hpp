#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "cdmgen/random.hpp"

namespace cdmgen::dist {

/// Gaussian. A positive `period` makes log_density measure the residual by the
/// shortest distance on a circle of that period (used for angle observables).
struct Normal {
  double mean = 0.0;
  double stddev = 1.0;
  double period = 0.0;
};

struct TruncatedNormal {
  double mean = 0.0;
  double stddev = 1.0;
  double lower = 0.0;
  double upper = 1.0;
};

struct Uniform {
  double lower = 0.0;
  double upper = 1.0;
};

struct LogUniform {
  double lower = 1.0;
  double upper = 10.0;
};

/// Piecewise-constant density; `masses[k]` is the probability of [edges[k], edges[k+1]).
struct Histogram {
  std::vector<double> edges;
  std::vector<double> masses;
};

/// Values 0 and 1.
struct Bernoulli {
  double p = 0.5;
};

struct Mixture {
  std::vector<double> weights;
  std::vector<TruncatedNormal> components;
};

using Distribution = std::variant<Normal, TruncatedNormal, Uniform, LogUniform, Histogram, Bernoulli, Mixture>;

/// Builds a histogram with masses rescaled to sum to one. Throws ConfigError on bad input.
Histogram make_histogram(std::vector<double> edges, std::vector<double> masses);
/// Builds a mixture with weights rescaled to sum to one.
Mixture make_mixture(std::vector<double> weights, std::vector<TruncatedNormal> components);

/// Throws ConfigError when parameters are invalid.
void validate(const Distribution& d);

std::string_view kind_name(const Distribution& d);

/// Natural log of the density (or mass for Bernoulli); -inf outside the support.
double log_density(const Distribution& d, double x);
double sample(const Distribution& d, RandomStream& rng);
double cdf(const Distribution& d, double x);
double mean(const Distribution& d);
double variance(const Distribution& d);

struct Support {
  double lower;
  double upper;
};
Support support(const Distribution& d);

}  // namespace cdmgen::dist
