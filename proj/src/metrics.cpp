#include "rea/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rea {

double abre(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("abre requires positive inputs");
  return std::abs(x - y) / std::min(x, y);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

namespace {

void check_pairs(std::span<const double> p, std::span<const double> t) {
  if (p.size() != t.size()) throw std::invalid_argument("prediction/truth length mismatch");
  if (p.empty()) throw std::invalid_argument("metrics over an empty sample");
}

}  // namespace

double mdae(std::span<const double> predictions, std::span<const double> truths) {
  check_pairs(predictions, truths);
  std::vector<double> err(predictions.size());
  for (std::size_t i = 0; i < err.size(); ++i) err[i] = std::abs(predictions[i] - truths[i]);
  return median(std::move(err));
}

double mdabre(std::span<const double> predictions, std::span<const double> truths) {
  check_pairs(predictions, truths);
  std::vector<double> err(predictions.size());
  for (std::size_t i = 0; i < err.size(); ++i) err[i] = abre(predictions[i], truths[i]);
  return median(std::move(err));
}

MetricsReport make_report(std::span<const double> predictions, std::span<const double> truths,
                          nlohmann::json config) {
  MetricsReport r;
  r.mdae = mdae(predictions, truths);
  r.mdabre = mdabre(predictions, truths);
  r.n = predictions.size();
  r.config = std::move(config);
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  return {{"mdae", r.mdae}, {"mdabre", r.mdabre}, {"mdabre_percent", 100.0 * r.mdabre},
          {"n", r.n}, {"config", r.config}};
}

MeanCi mean_ci95(std::span<const double> values) {
  MeanCi out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  out.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
  return out;
}

}  // namespace rea
