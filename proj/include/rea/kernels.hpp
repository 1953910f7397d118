#pragma once

#include <span>
#include <vector>

#include "rea/model.hpp"
#include "rea/trainer.hpp"

// Data-parallel kernels of the training loop. Every kernel in rea::kernels
// runs its outer loop with OpenMP; the functions in rea::reference compute
// the same thing with plain serial loops and exist for testing and the
// benchmark. Per-item results are written to private slots and reduced in
// item order, so the parallel kernels are deterministic for any thread count.

namespace rea::kernels {

void set_threads(int threads);
int max_threads();

EmbeddingTable refresh_embeddings(const ModelParams& params, const Problem& problem,
                                  std::size_t epoch);

std::vector<std::vector<Neighbor>> geo_candidates(const Problem& problem,
                                                  std::span<const std::size_t> rows,
                                                  const TrainConfig& config);

std::vector<ComparableSet> sample_comparables(const Problem& problem,
                                              std::span<const std::size_t> rows,
                                              const EmbeddingTable& table,
                                              const std::vector<std::vector<Neighbor>>& candidates,
                                              const TrainConfig& config);

LossAndGrads loss_and_grads(const ModelParams& params, std::span<const BatchItem> batch);

std::vector<Prediction> forward_all(const ModelParams& params, std::span<const BatchItem> items);

}  // namespace rea::kernels

namespace rea::reference {

EmbeddingTable refresh_embeddings(const ModelParams& params, const Problem& problem,
                                  std::size_t epoch);

std::vector<std::vector<Neighbor>> geo_candidates(const Problem& problem,
                                                  std::span<const std::size_t> rows,
                                                  const TrainConfig& config);

std::vector<ComparableSet> sample_comparables(const Problem& problem,
                                              std::span<const std::size_t> rows,
                                              const EmbeddingTable& table,
                                              const std::vector<std::vector<Neighbor>>& candidates,
                                              const TrainConfig& config);

/// Accumulates every example straight into one gradient buffer.
LossAndGrads loss_and_grads(const ModelParams& params, std::span<const BatchItem> batch);

std::vector<Prediction> forward_all(const ModelParams& params, std::span<const BatchItem> items);

}  // namespace rea::reference
