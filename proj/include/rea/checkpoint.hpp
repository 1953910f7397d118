#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rea/data.hpp"
#include "rea/model.hpp"
#include "rea/trainer.hpp"

namespace rea {

/// Everything needed to rebuild predictions from a parameter file.
struct CheckpointManifest {
  ModelConfig model;
  TrainConfig train;
  TargetTransform transform;
  ScalerParams scaler;
  std::vector<std::string> feature_names;
  std::vector<std::string> relative_features = relative_feature_names();
  /// Completed epochs of the stored weights.
  std::size_t epoch = 0;
};

nlohmann::json to_json(const CheckpointManifest& manifest);
CheckpointManifest manifest_from_json(const nlohmann::json& j);

struct Checkpoint {
  CheckpointManifest manifest;
  ModelParams params;
};

/// Writes dir/manifest.json and dir/params.bin.
void save_checkpoint(const std::filesystem::path& dir, const ModelParams& params,
                     const CheckpointManifest& manifest);
/// Throws ValidationError naming the missing path.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

/// Rejects checkpoints whose feature layout differs from the dataset's.
void check_compatible(const CheckpointManifest& manifest, const Dataset& dataset);

}  // namespace rea
