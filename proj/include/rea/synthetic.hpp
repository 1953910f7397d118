#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "rea/data.hpp"

namespace rea {

struct FeatureSpec {
  double mean = 0.0;
  double std = 1.0;
};

/// Generator for desk-scale datasets:
///   log(price[/surface]) = base + spatial(lat, lon) + hedonic · features + noise · N(0, 1)
/// where spatial is a sum of random plane waves over the region box.
struct SynthConfig {
  double lat_min = 48.00;
  double lat_max = 48.20;
  double lon_min = -1.80;
  double lon_max = -1.50;
  std::size_t n = 5000;
  std::vector<FeatureSpec> features = std::vector<FeatureSpec>(8);
  /// Explicit coefficients; when empty they are drawn and rescaled to hedonic_norm.
  std::vector<double> hedonic;
  double hedonic_norm = 0.4;
  double spatial_amplitude = 0.15;
  std::size_t spatial_waves = 4;
  double noise = 0.05;
  double base_log_price = 12.5;
  DayNumber start_date = 16801;  // 2016-01-01
  DayNumber span_days = 2737;    // through 2023-06-30
  bool with_dates = true;
  bool with_surface = false;
  std::uint64_t seed = 1;
};

struct PlaneWave {
  double freq_lat = 0.0;
  double freq_lon = 0.0;
  double phase = 0.0;
};

/// Everything the generator drew, so tests can recompute prices.
struct SyntheticLatents {
  SynthConfig config;
  std::vector<double> hedonic;
  std::vector<PlaneWave> waves;

  double spatial(double lat, double lon) const;
  double hedonic_term(std::span<const double> features) const;
  /// Noise-free log target.
  double mean_log_target(const PropertyRecord& record) const;
};

struct SyntheticData {
  Dataset dataset;
  SyntheticLatents latents;
};

SyntheticData generate_synthetic(const SynthConfig& config);

nlohmann::json to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticLatents& latents);
SyntheticLatents latents_from_json(const nlohmann::json& j);

}  // namespace rea
