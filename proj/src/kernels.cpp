#include "rea/kernels.hpp"

#include <exception>
#include <stdexcept>

#include <omp.h>

namespace rea::kernels {

namespace {

// Runs body(i) for i in [0, n) in parallel and rethrows the exception of the
// lowest failing index, so error reporting matches the serial order.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  bool failed = false;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) reduction(|| : failed)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
      failed = true;
    }
  }
  if (!failed) return;
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

EmbeddingTable refresh_embeddings(const ModelParams& params, const Problem& problem,
                                  std::size_t epoch) {
  EmbeddingTable table;
  table.epoch = epoch;
  table.dim = params.embed_dim();
  table.encoder = params.encoder;
  table.z.assign(problem.dataset().size() * table.dim, 0.0);
  const auto& pool = problem.pool_rows();
  parallel_for(pool.size(), [&](std::size_t i) {
    const std::size_t row = pool[i];
    const auto z = params.encoder.infer(problem.scaled_features(row));
    std::copy(z.begin(), z.end(), table.z.begin() + static_cast<std::ptrdiff_t>(row * table.dim));
  });
  return table;
}

std::vector<std::vector<Neighbor>> geo_candidates(const Problem& problem,
                                                  std::span<const std::size_t> rows,
                                                  const TrainConfig& config) {
  std::vector<std::vector<Neighbor>> out(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) { out[i] = rea::geo_candidates(problem, rows[i], config); });
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
  std::vector<ComparableSet> out(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    out[i] = rea::sample_comparables(problem, rows[i], table, candidates[i], config);
  });
  return out;
}

LossAndGrads loss_and_grads(const ModelParams& params, std::span<const BatchItem> batch) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grads on an empty batch");
  const std::size_t p = params.param_count();
  const double weight = 1.0 / static_cast<double>(batch.size());
  std::vector<double> slots(batch.size() * p, 0.0);
  std::vector<double> sq(batch.size(), 0.0);
  parallel_for(batch.size(), [&](std::size_t i) {
    sq[i] = accumulate_example_grads(params, batch[i], weight,
                                     std::span<double>(slots.data() + i * p, p));
  });
  LossAndGrads out;
  out.grads.assign(p, 0.0);
  double sse = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sse += sq[i];
    const double* slot = slots.data() + i * p;
    for (std::size_t j = 0; j < p; ++j) out.grads[j] += slot[j];
  }
  out.mse = sse * weight;
  return out;
}

std::vector<Prediction> forward_all(const ModelParams& params, std::span<const BatchItem> items) {
  std::vector<Prediction> out(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    out[i] = model_forward(params, items[i].target_features, *items[i].comparables);
  });
  return out;
}

}  // namespace rea::kernels
