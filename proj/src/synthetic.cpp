#include "rea/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rea/error.hpp"

namespace rea {

double SyntheticLatents::spatial(double lat, double lon) const {
  if (waves.empty() || config.spatial_amplitude == 0.0) return 0.0;
  const double u = (lat - config.lat_min) / (config.lat_max - config.lat_min);
  const double w = (lon - config.lon_min) / (config.lon_max - config.lon_min);
  double sum = 0.0;
  for (const auto& wave : waves) {
    sum += std::sin(2.0 * std::numbers::pi * (wave.freq_lat * u + wave.freq_lon * w) + wave.phase);
  }
  return config.spatial_amplitude * std::sqrt(2.0 / static_cast<double>(waves.size())) * sum;
}

double SyntheticLatents::hedonic_term(std::span<const double> features) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < hedonic.size(); ++j) sum += hedonic[j] * features[j];
  return sum;
}

double SyntheticLatents::mean_log_target(const PropertyRecord& r) const {
  return config.base_log_price + spatial(r.lat, r.lon) + hedonic_term(r.features);
}

SyntheticData generate_synthetic(const SynthConfig& config) {
  if (config.n < 1) throw ValidationError("synthetic dataset needs n >= 1");
  if (!(config.lat_max > config.lat_min) || !(config.lon_max > config.lon_min)) {
    throw ValidationError("synthetic region box is empty");
  }
  const std::size_t f = config.features.size();
  if (!config.hedonic.empty() && config.hedonic.size() != f) {
    throw ValidationError("hedonic coefficient count must match feature count");
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SyntheticLatents latents;
  latents.config = config;
  latents.hedonic = config.hedonic;
  if (latents.hedonic.empty()) {
    latents.hedonic.resize(f);
    double norm = 0.0;
    for (auto& b : latents.hedonic) {
      b = normal(rng);
      norm += b * b;
    }
    norm = std::sqrt(norm);
    for (auto& b : latents.hedonic) b = norm > 0.0 ? b * config.hedonic_norm / norm : 0.0;
  }
  for (std::size_t m = 0; m < config.spatial_waves; ++m) {
    PlaneWave wave;
    wave.freq_lat = 0.5 + 1.5 * unit(rng);
    wave.freq_lon = 0.5 + 1.5 * unit(rng);
    if (unit(rng) < 0.5) wave.freq_lon = -wave.freq_lon;
    wave.phase = 2.0 * std::numbers::pi * unit(rng);
    latents.waves.push_back(wave);
  }

  std::vector<std::string> names;
  for (std::size_t j = 0; j < f; ++j) names.push_back("f" + std::to_string(j + 1));

  std::vector<PropertyRecord> records;
  records.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    PropertyRecord r;
    r.id = static_cast<RecordId>(i + 1);
    r.lat = config.lat_min + (config.lat_max - config.lat_min) * unit(rng);
    r.lon = config.lon_min + (config.lon_max - config.lon_min) * unit(rng);
    if (config.with_dates) {
      r.date = config.start_date +
               static_cast<DayNumber>((static_cast<std::int64_t>(i) * config.span_days) /
                                      static_cast<std::int64_t>(config.n));
    }
    r.features.resize(f);
    for (std::size_t j = 0; j < f; ++j) {
      r.features[j] = config.features[j].mean + config.features[j].std * normal(rng);
    }
    const double eps = normal(rng);
    const double log_target = latents.mean_log_target(r) + config.noise * eps;
    if (config.with_surface) {
      r.surface = std::exp(std::log(80.0) + 0.3 * normal(rng));
      r.price = *r.surface * std::exp(log_target);
    } else {
      r.price = std::exp(log_target);
    }
    records.push_back(std::move(r));
  }
  return {Dataset(std::move(names), std::move(records)), std::move(latents)};
}

nlohmann::json to_json(const SynthConfig& c) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& fs : c.features) features.push_back({{"mean", fs.mean}, {"std", fs.std}});
  return {{"lat_min", c.lat_min},
          {"lat_max", c.lat_max},
          {"lon_min", c.lon_min},
          {"lon_max", c.lon_max},
          {"n", c.n},
          {"features", features},
          {"hedonic", c.hedonic},
          {"hedonic_norm", c.hedonic_norm},
          {"spatial_amplitude", c.spatial_amplitude},
          {"spatial_waves", c.spatial_waves},
          {"noise", c.noise},
          {"base_log_price", c.base_log_price},
          {"start_date", format_iso_date(c.start_date)},
          {"span_days", c.span_days},
          {"with_dates", c.with_dates},
          {"with_surface", c.with_surface},
          {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  c.lat_min = j.value("lat_min", c.lat_min);
  c.lat_max = j.value("lat_max", c.lat_max);
  c.lon_min = j.value("lon_min", c.lon_min);
  c.lon_max = j.value("lon_max", c.lon_max);
  c.n = j.value("n", c.n);
  if (j.contains("features")) {
    const auto& fj = j.at("features");
    c.features.clear();
    if (fj.is_number_unsigned() || fj.is_number_integer()) {
      c.features.resize(fj.get<std::size_t>());
    } else {
      for (const auto& e : fj) c.features.push_back({e.value("mean", 0.0), e.value("std", 1.0)});
    }
  }
  c.hedonic = j.value("hedonic", c.hedonic);
  c.hedonic_norm = j.value("hedonic_norm", c.hedonic_norm);
  c.spatial_amplitude = j.value("spatial_amplitude", c.spatial_amplitude);
  c.spatial_waves = j.value("spatial_waves", c.spatial_waves);
  c.noise = j.value("noise", c.noise);
  c.base_log_price = j.value("base_log_price", c.base_log_price);
  if (j.contains("start_date")) c.start_date = parse_iso_date(j.at("start_date").get<std::string>());
  c.span_days = j.value("span_days", c.span_days);
  c.with_dates = j.value("with_dates", c.with_dates);
  c.with_surface = j.value("with_surface", c.with_surface);
  c.seed = j.value("seed", c.seed);
  return c;
}

nlohmann::json to_json(const SyntheticLatents& l) {
  nlohmann::json waves = nlohmann::json::array();
  for (const auto& w : l.waves) {
    waves.push_back({{"freq_lat", w.freq_lat}, {"freq_lon", w.freq_lon}, {"phase", w.phase}});
  }
  return {{"config", to_json(l.config)}, {"hedonic", l.hedonic}, {"waves", waves}};
}

SyntheticLatents latents_from_json(const nlohmann::json& j) {
  SyntheticLatents l;
  l.config = synth_config_from_json(j.at("config"));
  l.hedonic = j.at("hedonic").get<std::vector<double>>();
  for (const auto& w : j.at("waves")) {
    l.waves.push_back({w.at("freq_lat").get<double>(), w.at("freq_lon").get<double>(),
                       w.at("phase").get<double>()});
  }
  return l;
}

}  // namespace rea
