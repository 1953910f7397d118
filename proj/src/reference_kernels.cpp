#include <stdexcept>

#include "rea/kernels.hpp"

namespace rea::reference {

EmbeddingTable refresh_embeddings(const ModelParams& params, const Problem& problem,
                                  std::size_t epoch) {
  EmbeddingTable table;
  table.epoch = epoch;
  table.dim = params.embed_dim();
  table.encoder = params.encoder;
  table.z.assign(problem.dataset().size() * table.dim, 0.0);
  for (std::size_t row : problem.pool_rows()) {
    const auto z = encode(params, problem.scaled_features(row));
    for (std::size_t d = 0; d < table.dim; ++d) table.z[row * table.dim + d] = z[d];
  }
  return table;
}

std::vector<std::vector<Neighbor>> geo_candidates(const Problem& problem,
                                                  std::span<const std::size_t> rows,
                                                  const TrainConfig& config) {
  std::vector<std::vector<Neighbor>> out;
  out.reserve(rows.size());
  for (std::size_t row : rows) out.push_back(rea::geo_candidates(problem, row, config));
  return out;
}

std::vector<ComparableSet> sample_comparables(const Problem& problem,
                                              std::span<const std::size_t> rows,
                                              const EmbeddingTable& table,
                                              const std::vector<std::vector<Neighbor>>& candidates,
                                              const TrainConfig& config) {
  if (candidates.size() != rows.size()) {
    throw std::invalid_argument("sample_comparables: one candidate list per target required");
  }
  std::vector<ComparableSet> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back(rea::sample_comparables(problem, rows[i], table, candidates[i], config));
  }
  return out;
}

LossAndGrads loss_and_grads(const ModelParams& params, std::span<const BatchItem> batch) {
  return rea::loss_and_grads(params, batch);
}

std::vector<Prediction> forward_all(const ModelParams& params, std::span<const BatchItem> items) {
  std::vector<Prediction> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(model_forward(params, item.target_features, *item.comparables));
  return out;
}

}  // namespace rea::reference
