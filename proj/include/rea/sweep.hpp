#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rea/baselines.hpp"
#include "rea/metrics.hpp"
#include "rea/trainer.hpp"

namespace rea {

struct SweepSpec {
  std::vector<RetrievalMode> modes = {RetrievalMode::geo_only, RetrievalMode::hybrid,
                                      RetrievalMode::vector_only};
  std::vector<std::size_t> k1_values = {1, 2, 4, 8};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  Partition partition = Partition::val;
};

struct SweepRow {
  RetrievalMode mode = RetrievalMode::hybrid;
  std::size_t total_comparables = 0;
  std::uint64_t seed = 0;
  double mdae = 0.0;
  double mdabre = 0.0;
};

struct SweepSummary {
  RetrievalMode mode = RetrievalMode::hybrid;
  std::size_t total_comparables = 0;
  MeanCi mdae;
  MeanCi mdabre;
};

/// Trains one REA model per (mode, k1, seed) cell, in that order, and
/// evaluates it on spec.partition. The split is shared by every cell; the
/// seed drives initialization and batch order.
std::vector<SweepRow> sweep_retrieval(const Dataset& dataset, const SplitSpec& split,
                                      TargetKind kind, const TrainConfig& base,
                                      const SweepSpec& spec);

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

/// mode,total_comparables,seed,mdae,mdabre
std::string sweep_csv(const std::vector<SweepRow>& rows);
/// mode,total_comparables,n_seeds,mdae_mean,mdae_ci95,mdabre_mean,mdabre_ci95
std::string summary_csv(const std::vector<SweepSummary>& summary);

struct ModelRow {
  std::string model;
  std::uint64_t seed = 0;
  double mdae = 0.0;
  double mdabre = 0.0;
};

struct ComparisonSpec {
  TrainConfig rea;
  TrainConfig erea;
  std::size_t knn_k = 10;
  KnnSpace knn_space = KnnSpace::geo;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  Partition partition = Partition::test;
};

/// LR, kNN, REA and EREA on one split. The deterministic baselines get one row;
/// the trained models get one row per seed.
std::vector<ModelRow> compare_models(const Dataset& dataset, const SplitSpec& split,
                                     TargetKind kind, const ComparisonSpec& spec);

/// model,n_seeds,mdae_mean,mdae_ci95,mdabre_pct_mean,mdabre_pct_ci95
std::string comparison_csv(const std::vector<ModelRow>& rows);

}  // namespace rea
