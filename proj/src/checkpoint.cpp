#include "rea/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "rea/error.hpp"
#include "rea/param_io.hpp"

namespace rea {

nlohmann::json to_json(const CheckpointManifest& m) {
  return {{"format", "rea-checkpoint"},
          {"version", 1},
          {"variant", to_string(m.model.variant)},
          {"embed_dim", m.model.embed_dim},
          {"feature_dim", m.model.feature_dim},
          {"model", to_json(m.model)},
          {"train", to_json(m.train)},
          {"target_transform", to_json(m.transform)},
          {"scaler", to_json(m.scaler)},
          {"feature_names", m.feature_names},
          {"relative_features", m.relative_features},
          {"epoch", m.epoch}};
}

CheckpointManifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "rea-checkpoint") throw ValidationError("not a checkpoint manifest");
    CheckpointManifest m;
    m.model = model_config_from_json(j.at("model"));
    m.train = train_config_from_json(j.at("train"));
    m.transform = transform_from_json(j.at("target_transform"));
    m.scaler = scaler_from_json(j.at("scaler"));
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.relative_features = j.at("relative_features").get<std::vector<std::string>>();
    m.epoch = j.at("epoch").get<std::size_t>();
    if (m.relative_features != relative_feature_names()) {
      throw ValidationError("checkpoint uses an unsupported relative-feature schema");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint manifest: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& dir, const ModelParams& params,
                     const CheckpointManifest& manifest) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw RuntimeError("cannot write '" + (dir / "manifest.json").string() + "'");
    out << to_json(manifest).dump(2) << '\n';
  }
  write_params(dir / "params.bin", params.named_stacks());
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  const auto params_path = dir / "params.bin";
  for (const auto& p : {manifest_path, params_path}) {
    if (!std::filesystem::exists(p)) throw ValidationError("checkpoint file not found: " + p.string());
  }
  std::ifstream in(manifest_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cannot parse " + manifest_path.string() + ": " + e.what());
  }
  Checkpoint ck;
  ck.manifest = manifest_from_json(j);
  ck.params = ModelParams::from_named_stacks(ck.manifest.model.variant,
                                             ck.manifest.model.relative_dim,
                                             read_params(params_path));
  if (ck.params.feature_dim() != ck.manifest.model.feature_dim ||
      ck.params.embed_dim() != ck.manifest.model.embed_dim) {
    throw ValidationError("checkpoint parameters disagree with the manifest shapes");
  }
  return ck;
}

void check_compatible(const CheckpointManifest& manifest, const Dataset& dataset) {
  if (manifest.feature_names != dataset.feature_names()) {
    throw ValidationError("dataset features do not match the checkpoint schema (expected " +
                          std::to_string(manifest.feature_names.size()) + " features: " +
                          nlohmann::json(manifest.feature_names).dump() + ")");
  }
}

}  // namespace rea
