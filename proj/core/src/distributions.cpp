#include "cdmgen/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cdmgen/errors.hpp"
#include "cdmgen/numerics.hpp"

namespace cdmgen::dist {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

struct TruncatedMoments {
  double alpha, beta, mass;
};

TruncatedMoments standardize(const TruncatedNormal& t) {
  const double alpha = (t.lower - t.mean) / t.stddev;
  const double beta = (t.upper - t.mean) / t.stddev;
  return {alpha, beta, numerics::normal_interval_mass(alpha, beta)};
}

// z * phi(z), with the limit 0 at infinity
double z_phi(double z) { return std::isfinite(z) ? z * numerics::normal_pdf(z) : 0.0; }
double phi(double z) { return std::isfinite(z) ? numerics::normal_pdf(z) : 0.0; }

double tn_log_density(const TruncatedNormal& t, double x) {
  if (!(x >= t.lower && x <= t.upper)) return kNegInf;
  const auto m = standardize(t);
  return numerics::normal_log_pdf(x, t.mean, t.stddev) - std::log(m.mass);
}

double tn_density(const TruncatedNormal& t, double x) { return std::exp(tn_log_density(t, x)); }

double tn_sample(const TruncatedNormal& t, RandomStream& rng) {
  const auto m = standardize(t);
  if (m.alpha > 0.0) {
    // sample the mirrored lower tail for accuracy
    TruncatedNormal mirrored{-t.mean, t.stddev, -t.upper, -t.lower};
    return -tn_sample(mirrored, rng);
  }
  const double p_lo = numerics::normal_cdf(m.alpha);
  const double p_hi = numerics::normal_cdf(m.beta);
  const double u = p_lo + (p_hi - p_lo) * rng.uniform();
  const double x = t.mean + t.stddev * numerics::normal_quantile(u);
  return std::clamp(x, t.lower, t.upper);
}

double tn_mean(const TruncatedNormal& t) {
  const auto m = standardize(t);
  return t.mean + t.stddev * (phi(m.alpha) - phi(m.beta)) / m.mass;
}

double tn_variance(const TruncatedNormal& t) {
  const auto m = standardize(t);
  const double shift = (phi(m.alpha) - phi(m.beta)) / m.mass;
  return t.stddev * t.stddev * (1.0 + (z_phi(m.alpha) - z_phi(m.beta)) / m.mass - shift * shift);
}

double tn_cdf(const TruncatedNormal& t, double x) {
  if (x <= t.lower) return 0.0;
  if (x >= t.upper) return 1.0;
  const auto m = standardize(t);
  return numerics::normal_interval_mass(m.alpha, (x - t.mean) / t.stddev) / m.mass;
}

std::size_t histogram_bin(const Histogram& h, double x) {
  auto it = std::upper_bound(h.edges.begin(), h.edges.end(), x);
  std::size_t k = static_cast<std::size_t>(it - h.edges.begin());
  if (k == h.edges.size() && x == h.edges.back()) return h.masses.size() - 1;
  return k - 1;
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void validate_tn(const TruncatedNormal& t) {
  check(std::isfinite(t.mean) && t.stddev > 0.0 && std::isfinite(t.stddev),
        "truncated_normal: mean must be finite and stddev positive");
  check(t.lower < t.upper, "truncated_normal: lower must be below upper");
  check(standardize(t).mass > 0.0, "truncated_normal: bounds hold no probability mass");
}

}  // namespace

Histogram make_histogram(std::vector<double> edges, std::vector<double> masses) {
  Histogram h{std::move(edges), std::move(masses)};
  check(h.edges.size() >= 2 && h.masses.size() + 1 == h.edges.size(),
        "histogram: need n+1 edges for n masses");
  const double total = std::accumulate(h.masses.begin(), h.masses.end(), 0.0);
  check(total > 0.0 && std::isfinite(total), "histogram: masses must have a positive finite sum");
  for (double& m : h.masses) m /= total;
  validate(h);
  return h;
}

Mixture make_mixture(std::vector<double> weights, std::vector<TruncatedNormal> components) {
  Mixture m{std::move(weights), std::move(components)};
  check(!m.weights.empty() && m.weights.size() == m.components.size(),
        "mixture: need one weight per component");
  const double total = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
  check(total > 0.0 && std::isfinite(total), "mixture: weights must have a positive finite sum");
  for (double& w : m.weights) w /= total;
  validate(m);
  return m;
}

void validate(const Distribution& d) {
  std::visit(Overloaded{
                 [](const Normal& n) {
                   check(std::isfinite(n.mean) && n.stddev > 0.0 && std::isfinite(n.stddev) && n.period >= 0.0,
                         "normal: mean must be finite, stddev positive, period non-negative");
                 },
                 [](const TruncatedNormal& t) { validate_tn(t); },
                 [](const Uniform& u) {
                   check(std::isfinite(u.lower) && std::isfinite(u.upper) && u.lower < u.upper,
                         "uniform: need finite lower < upper");
                 },
                 [](const LogUniform& u) {
                   check(u.lower > 0.0 && std::isfinite(u.upper) && u.lower < u.upper,
                         "log_uniform: need 0 < lower < upper");
                 },
                 [](const Histogram& h) {
                   check(h.edges.size() >= 2 && h.masses.size() + 1 == h.edges.size(),
                         "histogram: need n+1 edges for n masses");
                   for (std::size_t k = 0; k + 1 < h.edges.size(); ++k) {
                     check(std::isfinite(h.edges[k]) && h.edges[k] < h.edges[k + 1],
                           "histogram: bin edges must be finite and strictly increasing");
                   }
                   double total = 0.0;
                   for (double m : h.masses) {
                     check(m >= 0.0, "histogram: masses must be non-negative");
                     total += m;
                   }
                   check(std::abs(total - 1.0) < 1e-9, "histogram: masses must sum to one");
                 },
                 [](const Bernoulli& b) { check(b.p >= 0.0 && b.p <= 1.0, "bernoulli: p must lie in [0, 1]"); },
                 [](const Mixture& m) {
                   check(!m.weights.empty() && m.weights.size() == m.components.size(),
                         "mixture: need one weight per component");
                   double total = 0.0;
                   for (double w : m.weights) {
                     check(w >= 0.0, "mixture: weights must be non-negative");
                     total += w;
                   }
                   check(std::abs(total - 1.0) < 1e-9, "mixture: weights must sum to one");
                   for (const auto& c : m.components) validate_tn(c);
                 },
             },
             d);
}

std::string_view kind_name(const Distribution& d) {
  return std::visit(Overloaded{
                        [](const Normal&) { return std::string_view("normal"); },
                        [](const TruncatedNormal&) { return std::string_view("truncated_normal"); },
                        [](const Uniform&) { return std::string_view("uniform"); },
                        [](const LogUniform&) { return std::string_view("log_uniform"); },
                        [](const Histogram&) { return std::string_view("histogram"); },
                        [](const Bernoulli&) { return std::string_view("bernoulli"); },
                        [](const Mixture&) { return std::string_view("mixture"); },
                    },
                    d);
}

double log_density(const Distribution& d, double x) {
  return std::visit(
      Overloaded{
          [x](const Normal& n) {
            double r = x - n.mean;
            if (n.period > 0.0) {
              r = std::remainder(r, n.period);
            }
            return numerics::normal_log_pdf(r, 0.0, n.stddev);
          },
          [x](const TruncatedNormal& t) { return tn_log_density(t, x); },
          [x](const Uniform& u) {
            return (x >= u.lower && x <= u.upper) ? -std::log(u.upper - u.lower) : kNegInf;
          },
          [x](const LogUniform& u) {
            return (x >= u.lower && x <= u.upper) ? -std::log(x) - std::log(std::log(u.upper / u.lower))
                                                  : kNegInf;
          },
          [x](const Histogram& h) {
            if (!(x >= h.edges.front() && x <= h.edges.back())) return kNegInf;
            const std::size_t k = histogram_bin(h, x);
            if (h.masses[k] <= 0.0) return kNegInf;
            return std::log(h.masses[k]) - std::log(h.edges[k + 1] - h.edges[k]);
          },
          [x](const Bernoulli& b) {
            if (x == 1.0) return std::log(b.p);
            if (x == 0.0) return std::log1p(-b.p);
            return kNegInf;
          },
          [x](const Mixture& m) {
            double total = 0.0;
            for (std::size_t k = 0; k < m.weights.size(); ++k) total += m.weights[k] * tn_density(m.components[k], x);
            return total > 0.0 ? std::log(total) : kNegInf;
          },
      },
      d);
}

double sample(const Distribution& d, RandomStream& rng) {
  return std::visit(Overloaded{
                        [&rng](const Normal& n) { return rng.normal(n.mean, n.stddev); },
                        [&rng](const TruncatedNormal& t) { return tn_sample(t, rng); },
                        [&rng](const Uniform& u) { return rng.uniform(u.lower, u.upper); },
                        [&rng](const LogUniform& u) {
                          return u.lower * std::exp(rng.uniform() * std::log(u.upper / u.lower));
                        },
                        [&rng](const Histogram& h) {
                          const double u = rng.uniform();
                          double cumulative = 0.0;
                          std::size_t k = 0;
                          for (; k + 1 < h.masses.size(); ++k) {
                            cumulative += h.masses[k];
                            if (u < cumulative && h.masses[k] > 0.0) break;
                          }
                          while (h.masses[k] <= 0.0 && k > 0) --k;
                          return rng.uniform(h.edges[k], h.edges[k + 1]);
                        },
                        [&rng](const Bernoulli& b) { return rng.uniform() < b.p ? 1.0 : 0.0; },
                        [&rng](const Mixture& m) {
                          const double u = rng.uniform();
                          double cumulative = 0.0;
                          std::size_t k = 0;
                          for (; k + 1 < m.weights.size(); ++k) {
                            cumulative += m.weights[k];
                            if (u < cumulative) break;
                          }
                          return tn_sample(m.components[k], rng);
                        },
                    },
                    d);
}

double cdf(const Distribution& d, double x) {
  return std::visit(Overloaded{
                        [x](const Normal& n) { return numerics::normal_cdf((x - n.mean) / n.stddev); },
                        [x](const TruncatedNormal& t) { return tn_cdf(t, x); },
                        [x](const Uniform& u) { return std::clamp((x - u.lower) / (u.upper - u.lower), 0.0, 1.0); },
                        [x](const LogUniform& u) {
                          if (x <= u.lower) return 0.0;
                          if (x >= u.upper) return 1.0;
                          return std::log(x / u.lower) / std::log(u.upper / u.lower);
                        },
                        [x](const Histogram& h) {
                          if (x <= h.edges.front()) return 0.0;
                          if (x >= h.edges.back()) return 1.0;
                          const std::size_t k = histogram_bin(h, x);
                          double below = 0.0;
                          for (std::size_t j = 0; j < k; ++j) below += h.masses[j];
                          return below + h.masses[k] * (x - h.edges[k]) / (h.edges[k + 1] - h.edges[k]);
                        },
                        [x](const Bernoulli& b) { return x < 0.0 ? 0.0 : (x < 1.0 ? 1.0 - b.p : 1.0); },
                        [x](const Mixture& m) {
                          double total = 0.0;
                          for (std::size_t k = 0; k < m.weights.size(); ++k) total += m.weights[k] * tn_cdf(m.components[k], x);
                          return total;
                        },
                    },
                    d);
}

double mean(const Distribution& d) {
  return std::visit(Overloaded{
                        [](const Normal& n) { return n.mean; },
                        [](const TruncatedNormal& t) { return tn_mean(t); },
                        [](const Uniform& u) { return 0.5 * (u.lower + u.upper); },
                        [](const LogUniform& u) { return (u.upper - u.lower) / std::log(u.upper / u.lower); },
                        [](const Histogram& h) {
                          double total = 0.0;
                          for (std::size_t k = 0; k < h.masses.size(); ++k) {
                            total += h.masses[k] * 0.5 * (h.edges[k] + h.edges[k + 1]);
                          }
                          return total;
                        },
                        [](const Bernoulli& b) { return b.p; },
                        [](const Mixture& m) {
                          double total = 0.0;
                          for (std::size_t k = 0; k < m.weights.size(); ++k) total += m.weights[k] * tn_mean(m.components[k]);
                          return total;
                        },
                    },
                    d);
}

double variance(const Distribution& d) {
  return std::visit(Overloaded{
                        [](const Normal& n) { return n.stddev * n.stddev; },
                        [](const TruncatedNormal& t) { return tn_variance(t); },
                        [](const Uniform& u) {
                          const double w = u.upper - u.lower;
                          return w * w / 12.0;
                        },
                        [](const LogUniform& u) {
                          const double log_ratio = std::log(u.upper / u.lower);
                          const double m1 = (u.upper - u.lower) / log_ratio;
                          const double m2 = (u.upper * u.upper - u.lower * u.lower) / (2.0 * log_ratio);
                          return m2 - m1 * m1;
                        },
                        [](const Histogram& h) {
                          double m1 = 0.0, m2 = 0.0;
                          for (std::size_t k = 0; k < h.masses.size(); ++k) {
                            const double a = h.edges[k], b = h.edges[k + 1];
                            m1 += h.masses[k] * 0.5 * (a + b);
                            m2 += h.masses[k] * (a * a + a * b + b * b) / 3.0;
                          }
                          return m2 - m1 * m1;
                        },
                        [](const Bernoulli& b) { return b.p * (1.0 - b.p); },
                        [](const Mixture& m) {
                          double m1 = 0.0, m2 = 0.0;
                          for (std::size_t k = 0; k < m.weights.size(); ++k) {
                            const double mu = tn_mean(m.components[k]);
                            m1 += m.weights[k] * mu;
                            m2 += m.weights[k] * (tn_variance(m.components[k]) + mu * mu);
                          }
                          return m2 - m1 * m1;
                        },
                    },
                    d);
}

Support support(const Distribution& d) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(Overloaded{
                        [](const Normal&) { return Support{-inf, inf}; },
                        [](const TruncatedNormal& t) { return Support{t.lower, t.upper}; },
                        [](const Uniform& u) { return Support{u.lower, u.upper}; },
                        [](const LogUniform& u) { return Support{u.lower, u.upper}; },
                        [](const Histogram& h) { return Support{h.edges.front(), h.edges.back()}; },
                        [](const Bernoulli&) { return Support{0.0, 1.0}; },
                        [](const Mixture& m) {
                          Support s{inf, -inf};
                          for (const auto& c : m.components) {
                            s.lower = std::min(s.lower, c.lower);
                            s.upper = std::max(s.upper, c.upper);
                          }
                          return s;
                        },
                    },
                    d);
}

}  // namespace cdmgen::dist
