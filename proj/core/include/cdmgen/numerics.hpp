#pragma once

#include <functional>
#include <span>

namespace cdmgen::numerics {

double normal_pdf(double z);
double normal_cdf(double z);
/// 1 - normal_cdf(z) without cancellation in the upper tail.
double normal_ccdf(double z);
/// Phi(b) - Phi(a) for a <= b, accurate in both tails.
double normal_interval_mass(double a, double b);
double normal_quantile(double p);
double normal_log_pdf(double x, double mean, double stddev);

double log_sum_exp(std::span<const double> values);

struct MinimizeResult {
  double x;
  double f;
  int evaluations;
};

/// Golden-section minimisation of `f` on [lo, hi] until the bracket is narrower
/// than `tolerance`, followed by one parabolic step through the final triple.
/// The parabolic vertex is kept only when it improves on the golden result.
MinimizeResult golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                       double tolerance);

/// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double relative_tolerance,
                 double* error_estimate = nullptr);

}  // namespace cdmgen::numerics
