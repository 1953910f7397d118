#pragma once

#include <span>
#include <vector>

#include "json.hpp"

namespace rea {

/// |x - y| / min(x, y). Throws std::invalid_argument unless both are positive.
double abre(double x, double y);

/// Midpoint of the two central order statistics for even sizes.
double median(std::vector<double> values);

double mdae(std::span<const double> predictions, std::span<const double> truths);
double mdabre(std::span<const double> predictions, std::span<const double> truths);

struct MetricsReport {
  double mdae = 0.0;
  /// Fraction; multiply by 100 for percent.
  double mdabre = 0.0;
  std::size_t n = 0;
  nlohmann::json config = nlohmann::json::object();
};

MetricsReport make_report(std::span<const double> predictions, std::span<const double> truths,
                          nlohmann::json config = nlohmann::json::object());

nlohmann::json to_json(const MetricsReport& report);

/// Mean and normal-approximation 95% half-width 1.96·sd/√n (sample sd; 0 for n = 1).
struct MeanCi {
  double mean = 0.0;
  double ci95 = 0.0;
  std::size_t n = 0;
};

MeanCi mean_ci95(std::span<const double> values);

}  // namespace rea
