#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rea/baselines.hpp"
#include "rea/data.hpp"
#include "rea/sweep.hpp"
#include "rea/synthetic.hpp"
#include "rea/trainer.hpp"

namespace rea::cli {

inline constexpr const char* kOutputRootEnv = "REA_OUTPUT_ROOT";

struct SplitParams {
  SplitMode mode = SplitMode::temporal;
  double offset_years = 3.0;
  double train_frac = 0.8;
  double val_frac = 0.1;
  std::uint64_t seed = 0;
  /// Existing split JSON; when set it replaces the parameters above.
  std::optional<std::filesystem::path> path;
};

struct EvalParams {
  Partition partition = Partition::test;
  bool baselines = false;
  std::size_t knn_k = 10;
  KnnSpace knn_space = KnnSpace::geo;
};

struct SweepParams {
  /// "retrieval" (per-mode comparable sweep) or "models" (baseline table).
  std::string kind = "retrieval";
  SweepSpec retrieval;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::size_t knn_k = 10;
  KnnSpace knn_space = KnnSpace::geo;
  Partition partition = Partition::test;
};

struct PredictParams {
  std::optional<RecordId> target_id;
  /// Single-row CSV in the dataset's schema.
  std::optional<std::filesystem::path> record_csv;
};

struct RunConfig {
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> dataset_path;
  CsvSchema schema;
  TargetKind target = TargetKind::log_price;
  int threads = 0;
  SynthConfig synth;
  SplitParams split;
  TrainConfig train;
  EvalParams eval;
  SweepParams sweep;
  PredictParams predict;

  std::filesystem::path resolved_dataset() const;
};

/// Every accepted key with its default value.
nlohmann::json default_config_json();

/// Throws ValidationError on keys absent from `defaults`, naming the dotted path.
void reject_unknown_keys(const nlohmann::json& defaults, const nlohmann::json& given,
                         const std::string& prefix = "");

/// key=value with a dotted key; the value is parsed as JSON and falls back to a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Relative output directories are placed under $REA_OUTPUT_ROOT when it is set.
RunConfig parse_run_config(const nlohmann::json& merged);
RunConfig load_run_config(const std::filesystem::path& file, const std::vector<std::string>& sets);

void cmd_gen_synth(const RunConfig& config, std::ostream& log);
void cmd_split(const RunConfig& config, std::ostream& log);
void cmd_train(const RunConfig& config, std::ostream& log);
void cmd_eval(const RunConfig& config, std::ostream& log);
void cmd_sweep(const RunConfig& config, std::ostream& log);
void cmd_predict(const RunConfig& config, std::ostream& log);

/// Prediction JSON for one target, comparables sorted by descending attention.
nlohmann::json prediction_json(const Problem& problem, std::size_t target_row,
                               const TargetPrediction& prediction);

/// Full entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rea::cli
