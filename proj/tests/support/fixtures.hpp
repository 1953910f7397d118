#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rea/data.hpp"
#include "rea/model.hpp"
#include "rea/synthetic.hpp"

namespace rea::testing {

inline std::vector<std::string> feature_names(std::size_t f) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < f; ++i) names.push_back("f" + std::to_string(i + 1));
  return names;
}

/// Uniform random records in a small box; ids 1..n, dates spread over ~6 years.
inline Dataset random_dataset(std::size_t n, std::size_t f, std::uint64_t seed, bool dated = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(45.0, 45.3), lon(4.7, 5.1), price(5e4, 9e5);
  std::uniform_int_distribution<int> day(16801, 16801 + 2200);
  std::normal_distribution<double> feat(0.0, 1.0);
  std::vector<PropertyRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    PropertyRecord r;
    r.id = static_cast<RecordId>(i + 1);
    r.lat = lat(rng);
    r.lon = lon(rng);
    if (dated) r.date = day(rng);
    r.price = price(rng);
    for (std::size_t j = 0; j < f; ++j) r.features.push_back(feat(rng));
    records.push_back(std::move(r));
  }
  return Dataset(feature_names(f), std::move(records));
}

inline SyntheticData small_synthetic(std::size_t n, std::uint64_t seed = 3) {
  SynthConfig c;
  c.n = n;
  c.seed = seed;
  return generate_synthetic(c);
}

/// Random comparable set with distinct ids 1..m.
inline ComparableSet random_set(std::mt19937_64& rng, std::size_t m, std::size_t f,
                                double value_center = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> v(value_center * 0.8, value_center * 1.2);
  std::uniform_real_distribution<double> dist(0.0, 3.0), dt(0.0, 5.0);
  ComparableSet set;
  set.target_id = 0;
  for (std::size_t i = 0; i < m; ++i) {
    ComparableEntry e;
    e.id = static_cast<RecordId>(i + 1);
    e.source = i % 2 == 0 ? Source::geo : Source::vector;
    for (std::size_t j = 0; j < f; ++j) e.features.push_back(g(rng));
    e.relative = {dist(rng), dt(rng)};
    e.value = v(rng);
    set.entries.push_back(std::move(e));
  }
  return set;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> out(n);
  for (auto& x : out) x = g(rng);
  return out;
}

}  // namespace rea::testing
