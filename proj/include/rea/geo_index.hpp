#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "rea/data.hpp"

namespace rea {

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

/// Great-circle distance in meters on a sphere of radius kEarthRadiusMeters.
double haversine(double lat1, double lon1, double lat2, double lon2);

/// A record passes iff id != exclude_id, its date is strictly before max_date
/// (when set; undated records then fail), and it belongs to pool (when set).
struct RetrievalFilter {
  std::optional<RecordId> exclude_id;
  std::optional<DayNumber> max_date;
  std::shared_ptr<const std::unordered_set<RecordId>> pool;

  bool admits(RecordId id, std::optional<DayNumber> date) const;
};

struct Neighbor {
  RecordId id = 0;
  /// Row of the neighbor in the dataset the index was built from.
  std::size_t row = 0;
  double distance_m = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ordering used by every geographic query: distance, then id.
inline bool closer(const Neighbor& a, const Neighbor& b) {
  return a.distance_m < b.distance_m || (a.distance_m == b.distance_m && a.id < b.id);
}

/// Exact k-nearest-neighbour index over haversine distance.
///
/// Entries are kept sorted by latitude; a query walks outward from the
/// query latitude in both directions and stops a side once the meridian
/// distance alone exceeds the current k-th best, so results equal a full
/// filtered scan.
class GeoIndex {
 public:
  GeoIndex() = default;
  /// Indexes the given rows of dataset (all rows when rows is empty).
  explicit GeoIndex(const Dataset& dataset, std::span<const std::size_t> rows = {});

  std::size_t size() const noexcept { return entries_.size(); }

  std::vector<Neighbor> knn(double lat, double lon, std::size_t k,
                            const RetrievalFilter& filter) const;
  /// Reference implementation: scan everything, sort by (distance, id).
  std::vector<Neighbor> knn_brute_force(double lat, double lon, std::size_t k,
                                        const RetrievalFilter& filter) const;

 private:
  struct Entry {
    RecordId id;
    std::size_t row;
    double lat;
    double lon;
    std::optional<DayNumber> date;
  };
  std::vector<Entry> entries_;  // sorted by (lat, id)
};

std::vector<Neighbor> knn_geo(const GeoIndex& index, const PropertyRecord& target, std::size_t k,
                              const RetrievalFilter& filter);

/// N = 3 * k1 + 25.
constexpr std::size_t candidate_pool_size(std::size_t k1) { return 3 * k1 + 25; }

/// The candidate_pool_size(k1) closest admissible records.
std::vector<Neighbor> candidate_pool(const GeoIndex& index, const PropertyRecord& target,
                                     std::size_t k1, const RetrievalFilter& filter);

}  // namespace rea
