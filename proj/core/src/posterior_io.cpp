#include <algorithm>
#include <cmath>
#include <limits>

#include "cdmgen/errors.hpp"
#include "cdmgen/io.hpp"
#include "io_internal.hpp"

namespace cdmgen::io {

using detail::Json;

namespace {
constexpr const char* kPosteriorFormat = "cdmgen-posterior";
}

void write_posterior(std::ostream& out, const ppl::WeightedPosterior& posterior, const std::vector<std::string>& sites,
                     const PosteriorHeader& header) {
  Json head{{"FORMAT", kPosteriorFormat}, {"VERSION", kFormatVersion}, {"SITES", sites}, {"N", posterior.size()}};
  for (const auto& [key, value] : header.numbers) head[key] = std::isfinite(value) ? Json(value) : Json(nullptr);
  for (const auto& [key, value] : header.texts) head[key] = value;
  out << head.dump() << '\n';
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    out << "{\"INDEX\":" << i << ",\"LOG_WEIGHT\":" << format_number(posterior.log_weights[i]);
    for (const auto& site : sites) {
      const auto v = posterior.traces[i].value(site);
      out << ',' << Json(site).dump() << ':' << (v ? format_number(*v) : "null");
    }
    out << "}\n";
  }
}

PosteriorSamples read_posterior(std::istream& in) {
  PosteriorSamples out;
  std::string line;
  std::size_t row = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = detail::parse_json(line, row);
    if (!have_header) {
      detail::check_version(j, kPosteriorFormat, row);
      const auto sites = j.find("SITES");
      if (sites == j.end() || !sites->is_array()) throw ParseError("header lacks SITES", row);
      out.sites = sites->get<std::vector<std::string>>();
      have_header = true;
      continue;
    }
    const auto w = j.find("LOG_WEIGHT");
    if (w == j.end()) throw ParseError("sample lacks LOG_WEIGHT", row);
    out.log_weights.push_back(w->is_number() ? w->get<double>() : -std::numeric_limits<double>::infinity());
    std::vector<double> values;
    for (const auto& site : out.sites) {
      const auto v = j.find(site);
      values.push_back(v != j.end() && v->is_number() ? v->get<double>() : std::nan(""));
    }
    out.values.push_back(std::move(values));
  }
  if (!have_header) throw ParseError("empty posterior file", 1);
  return out;
}

Histogram1d posterior_histogram(const PosteriorSamples& samples, const std::string& site, std::size_t bins) {
  const auto it = std::find(samples.sites.begin(), samples.sites.end(), site);
  if (it == samples.sites.end()) throw std::invalid_argument("site '" + site + "' not in posterior dump");
  if (bins == 0) throw std::invalid_argument("bins must be positive");
  const auto col = static_cast<std::size_t>(it - samples.sites.begin());

  const double peak = samples.log_weights.empty()
                          ? -std::numeric_limits<double>::infinity()
                          : *std::max_element(samples.log_weights.begin(), samples.log_weights.end());
  if (!std::isfinite(peak)) throw DegeneratePosterior("posterior dump has no finite weight");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < samples.values.size(); ++i) {
    const double v = samples.values[i][col];
    if (std::isnan(v) || !std::isfinite(samples.log_weights[i])) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) throw std::invalid_argument("site '" + site + "' has no weighted values");
  if (lo == hi) {
    const double half = std::max(std::abs(lo) * 1e-9, 1e-12);
    lo -= half;
    hi += half;
  }
  Histogram1d h;
  for (std::size_t k = 0; k <= bins; ++k) h.edges.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins));
  h.masses.assign(bins, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < samples.values.size(); ++i) {
    const double w = std::exp(samples.log_weights[i] - peak);
    total += w;
    const double v = samples.values[i][col];
    if (std::isnan(v) || w == 0.0) continue;
    const auto k = std::min(bins - 1, static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins)));
    h.masses[k] += w;
  }
  for (double& m : h.masses) m /= total;
  return h;
}

}  // namespace cdmgen::io
