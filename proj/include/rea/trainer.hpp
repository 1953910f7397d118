#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rea/data.hpp"
#include "rea/geo_index.hpp"
#include "rea/metrics.hpp"
#include "rea/model.hpp"
#include "rea/neural.hpp"

namespace rea {

enum class RetrievalMode { geo_only, vector_only, hybrid };

std::string to_string(RetrievalMode mode);
RetrievalMode retrieval_mode_from_string(std::string_view text);

enum class Partition { train, val, test };

std::string to_string(Partition partition);
Partition partition_from_string(std::string_view text);

struct TrainConfig {
  Variant variant = Variant::rea;
  RetrievalMode mode = RetrievalMode::hybrid;
  std::size_t k1 = 5;
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double base_lr = 1e-3;
  double encoder_decay = 0.98;
  std::uint64_t seed = 0;
  std::size_t embed_dim = 16;
  std::vector<std::size_t> encoder_hidden = {16};
  std::size_t gate_hidden = 8;
  std::size_t decoder_hidden = 16;
  /// Run validation metrics after every epoch.
  bool validate_each_epoch = true;

  /// 2·k1 comparables in total: (2k1, 0), (0, 2k1) or (k1, k1).
  std::size_t k_geo() const;
  std::size_t k_vec() const;
  std::size_t total_comparables() const { return k_geo() + k_vec(); }
  /// Candidate pool for vector re-ranking, N = 3·k1 + 25.
  std::size_t pool_size() const { return candidate_pool_size(k1); }
  /// Encoder learning rate during epoch e: base_lr · decay^e.
  double encoder_lr(std::size_t epoch) const;
  ModelConfig model_config(std::size_t feature_dim) const;
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& config);
/// Fields missing from j keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Immutable training/evaluation context: scaled features, target values,
/// and the geographic index over the comparable pool (offset ∪ train).
/// Holds a pointer to the dataset, which must outlive it.
class Problem {
 public:
  Problem(const Dataset& dataset, SplitSpec split, TargetTransform transform, ScalerParams scaler);
  /// Explicit date filtering, for query records appended to a stored split.
  Problem(const Dataset& dataset, SplitSpec split, TargetTransform transform, ScalerParams scaler,
          bool date_filter);

  /// Fits the scaler on the training partition and, for EREA, normalizes the
  /// target by the mean training log value.
  static Problem prepare(const Dataset& dataset, SplitSpec split, Variant variant, TargetKind kind);

  const Dataset& dataset() const { return *dataset_; }
  const SplitSpec& split() const { return split_; }
  const TargetTransform& transform() const { return transform_; }
  const ScalerParams& scaler() const { return scaler_; }
  std::size_t feature_dim() const { return dataset_->feature_dim(); }

  std::span<const double> scaled_features(std::size_t row) const;
  double value(std::size_t row) const { return values_[row]; }
  std::span<const double> values() const { return values_; }
  /// Target in reporting units: price, or price per m² for per-sqm targets.
  double unit_value(std::size_t row) const;
  double unit_from_value(double value) const { return std::exp(value * transform_.scale); }

  const std::vector<std::size_t>& pool_rows() const { return pool_rows_; }
  bool in_pool(std::size_t row) const { return in_pool_[row] != 0; }
  const GeoIndex& pool_index() const { return index_; }
  std::vector<std::size_t> rows(Partition partition) const;

  /// Comparables must differ from the target and, for temporal splits, be
  /// strictly older than it.
  bool date_filtered() const { return date_filter_; }
  RetrievalFilter filter_for(std::size_t target_row) const;

  ComparableEntry make_entry(std::size_t target_row, std::size_t comp_row, Source source) const;

 private:
  const Dataset* dataset_;
  SplitSpec split_;
  TargetTransform transform_;
  ScalerParams scaler_;
  bool date_filter_ = false;
  std::vector<double> scaled_;  // row-major, size() x feature_dim
  std::vector<double> values_;
  std::vector<std::size_t> pool_rows_;
  std::vector<char> in_pool_;
  GeoIndex index_;
};

/// Embeddings of every pool record under one set of encoder weights.
struct EmbeddingTable {
  /// Number of completed training epochs of the producing weights.
  std::size_t epoch = 0;
  std::size_t dim = 0;
  DenseStack encoder;     // the producing weights, used to embed queries
  std::vector<double> z;  // indexed by dataset row; rows outside the pool stay zero

  std::span<const double> at(std::size_t row) const { return {z.data() + row * dim, dim}; }
  /// Embedding of a target in the same space as the table.
  std::vector<double> query(const Problem& problem, std::size_t row) const;
};

/// Latest table plus the one refreshed just before it.
struct EmbeddingHistory {
  std::optional<EmbeddingTable> latest;
  std::optional<EmbeddingTable> previous;

  void push(EmbeddingTable table);
  std::size_t refreshes() const { return refreshes_; }
  /// Previous-to-last table when two refreshes happened, else the latest.
  const EmbeddingTable& for_evaluation(bool* fell_back = nullptr) const;

 private:
  std::size_t refreshes_ = 0;
};

EmbeddingTable refresh_embeddings(const ModelParams& params, const Problem& problem,
                                  std::size_t epoch);

/// Geo candidates of one target, closest first: the first k_geo are the
/// geographic comparables, the first N the vector re-ranking pool.
std::vector<Neighbor> geo_candidates(const Problem& problem, std::size_t target_row,
                                     const TrainConfig& config);

/// Builds C_t: geographic entries first (distance order), then vector
/// entries (descending dot product, ties by ascending id), drawn from
/// candidates with geo picks removed.
ComparableSet sample_comparables(const Problem& problem, std::size_t target_row,
                                 const EmbeddingTable& table, std::span<const Neighbor> candidates,
                                 const TrainConfig& config);

struct EpochLog {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  std::optional<double> val_mdae;
  std::optional<double> val_mdabre;
  double encoder_lr = 0.0;
  double wall_time_s = 0.0;
  std::size_t short_sets = 0;
};

nlohmann::json to_json(const EpochLog& log);
std::string to_jsonl(const std::vector<EpochLog>& log, bool include_wall_time = true);

/// Per-epoch view for tests and diagnostics.
struct EpochTrace {
  std::size_t epoch = 0;
  double encoder_lr_scale = 1.0;
  double other_lr_scale = 1.0;
  const std::vector<std::size_t>* target_rows = nullptr;
  const std::vector<ComparableSet>* sets = nullptr;
  const EmbeddingTable* table = nullptr;
};

struct TrainOptions {
  std::function<void(const EpochTrace&)> on_epoch;
};

struct TrainResult {
  ModelParams params;
  /// Weights at the start of the last epoch; they produced history.previous.
  ModelParams penultimate_params;
  EmbeddingHistory history;
  std::vector<EpochLog> log;
};

TrainResult train(const Problem& problem, const TrainConfig& config,
                  const TrainOptions& options = {});

struct TargetPrediction {
  RecordId target_id = 0;
  double predicted = 0.0;  // reporting units
  double truth = 0.0;
  ComparableSet comparables;
  Prediction prediction;
};

struct Evaluation {
  MetricsReport report;
  std::vector<TargetPrediction> predictions;
  bool used_latest_table = false;
};

/// Retrieval with `table`, forward with `params`, metrics in reporting units.
/// Throws EmptyPoolError naming the first target without admissible comparables.
Evaluation evaluate_with_table(const ModelParams& params, const EmbeddingTable& table,
                               const Problem& problem, const TrainConfig& config,
                               std::span<const std::size_t> rows);

/// Uses the previous-to-last table (latest when fewer than two refreshes).
Evaluation evaluate(const ModelParams& params, const EmbeddingHistory& history,
                    const Problem& problem, const TrainConfig& config, Partition partition);

}  // namespace rea
