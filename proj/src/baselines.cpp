#include "rea/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "rea/error.hpp"

namespace rea {

double LinearModel::predict(std::span<const double> x) const {
  double y = intercept;
  for (std::size_t j = 0; j < coef.size(); ++j) y += coef[j] * x[j];
  return y;
}

LinearModel fit_linear(std::span<const double> x, std::size_t n, std::size_t f,
                       std::span<const double> y, double jitter) {
  if (n == 0 || x.size() != n * f || y.size() != n) {
    throw ValidationError("linear regression: design matrix and targets disagree");
  }
  const std::size_t p = f + 1;  // column 0 is the intercept
  std::vector<double> a(p * p, 0.0), b(p, 0.0);
  std::vector<double> row(p);
  for (std::size_t i = 0; i < n; ++i) {
    row[0] = 1.0;
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(i * f), f, row.begin() + 1);
    for (std::size_t r = 0; r < p; ++r) {
      b[r] += row[r] * y[i];
      for (std::size_t c = 0; c <= r; ++c) a[r * p + c] += row[r] * row[c];
    }
  }
  for (std::size_t r = 0; r < p; ++r) {
    a[r * p + r] += jitter;
    for (std::size_t c = r + 1; c < p; ++c) a[r * p + c] = a[c * p + r];
  }

  // In-place Cholesky, lower triangle.
  for (std::size_t j = 0; j < p; ++j) {
    double d = a[j * p + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
    if (!(d > 0.0)) throw RuntimeError("linear regression: normal equations are singular");
    const double l = std::sqrt(d);
    a[j * p + j] = l;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a[i * p + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
      a[i * p + j] = s / l;
    }
  }
  std::vector<double> z(p);
  for (std::size_t i = 0; i < p; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * p + k] * z[k];
    z[i] = s / a[i * p + i];
  }
  std::vector<double> w(p);
  for (std::size_t i = p; i-- > 0;) {
    double s = z[i];
    for (std::size_t k = i + 1; k < p; ++k) s -= a[k * p + i] * w[k];
    w[i] = s / a[i * p + i];
  }
  LinearModel m;
  m.intercept = w[0];
  m.coef.assign(w.begin() + 1, w.end());
  return m;
}

MetricsReport baseline_linear(const Problem& problem, Partition partition) {
  const auto train_rows = problem.rows(Partition::train);
  const std::size_t f = problem.feature_dim();
  std::vector<double> x(train_rows.size() * f), y(train_rows.size());
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    const auto row = problem.scaled_features(train_rows[i]);
    std::copy(row.begin(), row.end(), x.begin() + static_cast<std::ptrdiff_t>(i * f));
    y[i] = problem.value(train_rows[i]);
  }
  const LinearModel model = fit_linear(x, train_rows.size(), f, y);

  const auto rows = problem.rows(partition);
  if (rows.empty()) throw ValidationError("cannot evaluate an empty partition");
  std::vector<double> pred, truth;
  for (auto r : rows) {
    pred.push_back(problem.unit_from_value(model.predict(problem.scaled_features(r))));
    truth.push_back(problem.unit_value(r));
  }
  return make_report(pred, truth, {{"model", "LR"}, {"partition", to_string(partition)}});
}

std::string to_string(KnnSpace space) { return space == KnnSpace::geo ? "geo" : "feature"; }

KnnSpace knn_space_from_string(std::string_view text) {
  if (text == "geo") return KnnSpace::geo;
  if (text == "feature") return KnnSpace::feature;
  throw ValidationError("unknown kNN space '" + std::string(text) + "'");
}

double knn_mean_value(const GeoIndex& index, std::span<const double> values_by_row,
                      const PropertyRecord& target, std::size_t k, const RetrievalFilter& filter) {
  if (k == 0) throw ValidationError("kNN baseline needs k >= 1");
  const auto nn = index.knn(target.lat, target.lon, k, filter);
  if (nn.empty()) {
    throw EmptyPoolError("kNN: no admissible neighbours for target " + std::to_string(target.id));
  }
  double sum = 0.0;
  for (const auto& n : nn) sum += values_by_row[n.row];
  return sum / static_cast<double>(nn.size());
}

double knn_predict(const Problem& problem, std::size_t target_row, std::size_t k, KnnSpace space) {
  const auto& dataset = problem.dataset();
  const auto filter = problem.filter_for(target_row);
  if (space == KnnSpace::geo) {
    return problem.unit_from_value(
        knn_mean_value(problem.pool_index(), problem.values(), dataset[target_row], k, filter));
  }
  if (k == 0) throw ValidationError("kNN baseline needs k >= 1");
  const auto xt = problem.scaled_features(target_row);
  struct Cand {
    double d2;
    RecordId id;
    std::size_t row;
  };
  std::vector<Cand> cands;
  for (auto r : problem.pool_rows()) {
    if (!filter.admits(dataset[r].id, dataset[r].date)) continue;
    const auto xr = problem.scaled_features(r);
    double d2 = 0.0;
    for (std::size_t j = 0; j < xt.size(); ++j) d2 += (xt[j] - xr[j]) * (xt[j] - xr[j]);
    cands.push_back({d2, dataset[r].id, r});
  }
  if (cands.empty()) {
    throw EmptyPoolError("kNN: no admissible neighbours for target " +
                         std::to_string(dataset[target_row].id));
  }
  const std::size_t take = std::min(k, cands.size());
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take), cands.end(),
                    [](const Cand& a, const Cand& b) {
                      return a.d2 < b.d2 || (a.d2 == b.d2 && a.id < b.id);
                    });
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += problem.value(cands[i].row);
  return problem.unit_from_value(sum / static_cast<double>(take));
}

MetricsReport baseline_knn(const Problem& problem, Partition partition, std::size_t k,
                           KnnSpace space) {
  const auto rows = problem.rows(partition);
  if (rows.empty()) throw ValidationError("cannot evaluate an empty partition");
  std::vector<double> pred, truth;
  for (auto r : rows) {
    pred.push_back(knn_predict(problem, r, k, space));
    truth.push_back(problem.unit_value(r));
  }
  return make_report(pred, truth,
                     {{"model", "kNN"}, {"k", k}, {"space", to_string(space)},
                      {"partition", to_string(partition)}});
}

RedundancyReport redundancy_report(const Dataset& dataset) {
  RedundancyReport out;
  out.flags.assign(dataset.size(), false);
  if (dataset.size() < 2) return out;
  const GeoIndex index(dataset);
  std::size_t flagged = 0;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    RetrievalFilter filter;
    filter.exclude_id = dataset[r].id;
    const auto nn = index.knn(dataset[r].lat, dataset[r].lon, 1, filter);
    if (!nn.empty() && std::abs(dataset[nn.front().row].price - dataset[r].price) < 1.0) {
      out.flags[r] = true;
      ++flagged;
    }
  }
  out.fraction = static_cast<double>(flagged) / static_cast<double>(dataset.size());
  return out;
}

}  // namespace rea
