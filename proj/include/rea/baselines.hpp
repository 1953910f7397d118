#pragma once

#include <span>
#include <vector>

#include "rea/geo_index.hpp"
#include "rea/metrics.hpp"
#include "rea/trainer.hpp"

namespace rea {

struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coef;

  double predict(std::span<const double> x) const;
};

/// Ordinary least squares with an intercept, solved through the normal
/// equations (XᵀX + jitter·I) by Cholesky. x is row-major n × f.
/// Throws RuntimeError when the system is singular even after the jitter.
LinearModel fit_linear(std::span<const double> x, std::size_t n, std::size_t f,
                       std::span<const double> y, double jitter = 1e-8);

/// Fits on the training partition (scaled features, target space) and
/// reports metrics on `partition` in reporting units.
MetricsReport baseline_linear(const Problem& problem, Partition partition);

enum class KnnSpace { geo, feature };

std::string to_string(KnnSpace space);
KnnSpace knn_space_from_string(std::string_view text);

/// Mean of values[row] over the k nearest admissible entries of index.
/// Throws EmptyPoolError when nothing is admissible.
double knn_mean_value(const GeoIndex& index, std::span<const double> values_by_row,
                      const PropertyRecord& target, std::size_t k, const RetrievalFilter& filter);

/// Mean target value of the k nearest pool records, averaged in target space
/// and inverted to reporting units. Same pool and filters as retrieval.
double knn_predict(const Problem& problem, std::size_t target_row, std::size_t k, KnnSpace space);

MetricsReport baseline_knn(const Problem& problem, Partition partition, std::size_t k,
                           KnnSpace space = KnnSpace::geo);

struct RedundancyReport {
  double fraction = 0.0;
  /// flags[row]: the closest other record sold within one currency unit.
  std::vector<bool> flags;
};

RedundancyReport redundancy_report(const Dataset& dataset);

}  // namespace rea
