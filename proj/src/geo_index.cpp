#include "rea/geo_index.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>

#include "rea/error.hpp"

namespace rea {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Distance along a meridian is a lower bound on the great-circle distance.
// The slack absorbs rounding differences between the two formulas.
constexpr double kBoundSlack = 1.0 - 1e-9;

}  // namespace

double haversine(double lat1, double lon1, double lat2, double lon2) {
  const double phi1 = lat1 * kDegToRad;
  const double phi2 = lat2 * kDegToRad;
  const double dphi = (lat2 - lat1) * kDegToRad;
  const double dlambda = (lon2 - lon1) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  a = std::clamp(a, 0.0, 1.0);
  return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(a));
}

bool RetrievalFilter::admits(RecordId id, std::optional<DayNumber> date) const {
  if (exclude_id && id == *exclude_id) return false;
  if (max_date && (!date || !(*date < *max_date))) return false;
  if (pool && !pool->contains(id)) return false;
  return true;
}

GeoIndex::GeoIndex(const Dataset& dataset, std::span<const std::size_t> rows) {
  auto add = [&](std::size_t row) {
    const auto& r = dataset[row];
    entries_.push_back({r.id, row, r.lat, r.lon, r.date});
  };
  if (rows.empty()) {
    entries_.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) add(i);
  } else {
    entries_.reserve(rows.size());
    for (auto row : rows) add(row);
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.lat < b.lat || (a.lat == b.lat && a.id < b.id);
  });
  std::unordered_set<RecordId> ids;
  ids.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (!ids.insert(e.id).second) {
      throw ValidationError("geo index: duplicate id " + std::to_string(e.id));
    }
  }
}

std::vector<Neighbor> GeoIndex::knn(double lat, double lon, std::size_t k,
                                    const RetrievalFilter& filter) const {
  if (k == 0 || entries_.empty()) return {};

  // Max-heap on (distance, id): top() is the current worst kept neighbour.
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(&closer)> best(&closer);
  auto consider = [&](const Entry& e) {
    if (!filter.admits(e.id, e.date)) return;
    Neighbor n{e.id, e.row, haversine(lat, lon, e.lat, e.lon)};
    if (best.size() < k) {
      best.push(n);
    } else if (closer(n, best.top())) {
      best.pop();
      best.push(n);
    }
  };
  auto exhausted = [&](const Entry& e) {
    if (best.size() < k) return false;
    const double bound = kEarthRadiusMeters * std::abs(e.lat - lat) * kDegToRad * kBoundSlack;
    return bound > best.top().distance_m;
  };

  const auto start = std::lower_bound(entries_.begin(), entries_.end(), lat,
                                      [](const Entry& e, double v) { return e.lat < v; });
  auto up = start;
  auto down = start;
  bool up_open = up != entries_.end();
  bool down_open = down != entries_.begin();
  while (up_open || down_open) {
    if (up_open) {
      if (exhausted(*up)) {
        up_open = false;
      } else {
        consider(*up);
        up_open = ++up != entries_.end();
      }
    }
    if (down_open) {
      const Entry& e = *(down - 1);
      if (exhausted(e)) {
        down_open = false;
      } else {
        consider(e);
        down_open = --down != entries_.begin();
      }
    }
  }

  std::vector<Neighbor> out(best.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = best.top();
    best.pop();
  }
  return out;
}

std::vector<Neighbor> GeoIndex::knn_brute_force(double lat, double lon, std::size_t k,
                                                const RetrievalFilter& filter) const {
  std::vector<Neighbor> all;
  for (const auto& e : entries_) {
    if (filter.admits(e.id, e.date)) all.push_back({e.id, e.row, haversine(lat, lon, e.lat, e.lon)});
  }
  std::sort(all.begin(), all.end(), closer);
  if (all.size() > k) all.resize(k);
  return all;
}

std::vector<Neighbor> knn_geo(const GeoIndex& index, const PropertyRecord& target, std::size_t k,
                              const RetrievalFilter& filter) {
  return index.knn(target.lat, target.lon, k, filter);
}

std::vector<Neighbor> candidate_pool(const GeoIndex& index, const PropertyRecord& target,
                                     std::size_t k1, const RetrievalFilter& filter) {
  return index.knn(target.lat, target.lon, candidate_pool_size(k1), filter);
}

}  // namespace rea
