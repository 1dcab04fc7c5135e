#include "cdmgen/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace cdmgen::numerics {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_ccdf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_interval_mass(double a, double b) {
  if (b <= a) return 0.0;
  // Narrow intervals: differencing two CDF values would cancel, so integrate the density.
  if ((b - a) * std::max({1.0, std::abs(a), std::abs(b)}) < 0.5) {
    return boost::math::quadrature::gauss<double, 10>::integrate([](double z) { return normal_pdf(z); }, a, b);
  }
  if (a > 0.0) return normal_ccdf(a) - normal_ccdf(b);
  return normal_cdf(b) - normal_cdf(a);
}

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_log_pdf(double x, double mean, double stddev) {
  const double z = (x - mean) / stddev;
  return -0.5 * z * z - std::log(stddev) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double log_sum_exp(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double total = 0.0;
  for (double v : values) total += std::exp(v - peak);
  return peak + std::log(total);
}

MinimizeResult golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                       double tolerance) {
  MinimizeResult out{lo, 0.0, 0};
  if (hi < lo) std::swap(lo, hi);
  if (hi - lo <= 0.0) {
    out.f = f(lo);
    out.evaluations = 1;
    return out;
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  while (b - a > tolerance && evals < 400) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  double x = fc <= fd ? c : d;
  double fx = std::min(fc, fd);

  // one parabolic step through (c, fc), (x', f), (d, fd) sorted by abscissa
  const double x0 = c, x1 = d;
  const double mid = 0.5 * (x0 + x1);
  const double f_mid = f(mid);
  ++evals;
  if (f_mid < fx) {
    x = mid;
    fx = f_mid;
  }
  const double h = 0.5 * (x1 - x0);
  const double denom = fc - 2.0 * f_mid + fd;
  if (h > 0.0 && denom > 0.0) {
    const double vertex = mid + 0.5 * h * (fc - fd) / denom;
    if (vertex >= a && vertex <= b) {
      const double f_vertex = f(vertex);
      ++evals;
      if (f_vertex < fx) {
        x = vertex;
        fx = f_vertex;
      }
    }
  }
  out.x = x;
  out.f = fx;
  out.evaluations = evals;
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b, double relative_tolerance,
                 double* error_estimate) {
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, relative_tolerance, &err);
  if (error_estimate != nullptr) *error_estimate = err;
  return value;
}

}  // namespace cdmgen::numerics
