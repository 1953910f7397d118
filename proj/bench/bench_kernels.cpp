// Serial reference loops against the OpenMP kernels on a 5k synthetic problem.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <optional>

#include "rea/kernels.hpp"
#include "rea/synthetic.hpp"

namespace {

using namespace rea;

struct Fixture {
  SyntheticData data;
  SplitSpec split;
  std::optional<Problem> problem;
  TrainConfig config;
  ModelParams params;
  std::vector<std::size_t> rows;
  EmbeddingTable table;
  std::vector<std::vector<Neighbor>> candidates;
  std::vector<ComparableSet> sets;
  std::vector<BatchItem> items;

  Fixture() {
    SynthConfig sc;
    sc.n = 5000;
    data = generate_synthetic(sc);
    split = temporal_split(data.dataset, 3.0, 0.8, 0.1);
    problem.emplace(Problem::prepare(data.dataset, split, Variant::erea, TargetKind::log_price));
    config.variant = Variant::erea;
    params = ModelParams::create(config.model_config(problem->feature_dim()), 0);
    rows = problem->rows(Partition::train);
    table = reference::refresh_embeddings(params, *problem, 0);
    candidates = reference::geo_candidates(*problem, rows, config);
    sets = reference::sample_comparables(*problem, rows, table, candidates, config);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      items.push_back({problem->scaled_features(rows[i]), &sets[i], problem->value(rows[i])});
    }
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

template <bool Parallel>
void BM_Refresh(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) {
    auto t = Parallel ? kernels::refresh_embeddings(f.params, *f.problem, 0)
                      : reference::refresh_embeddings(f.params, *f.problem, 0);
    benchmark::DoNotOptimize(t.z.data());
  }
}

template <bool Parallel>
void BM_GeoCandidates(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) {
    auto c = Parallel ? kernels::geo_candidates(*f.problem, f.rows, f.config)
                      : reference::geo_candidates(*f.problem, f.rows, f.config);
    benchmark::DoNotOptimize(c.data());
  }
}

template <bool Parallel>
void BM_Sample(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) {
    auto s = Parallel ? kernels::sample_comparables(*f.problem, f.rows, f.table, f.candidates, f.config)
                      : reference::sample_comparables(*f.problem, f.rows, f.table, f.candidates, f.config);
    benchmark::DoNotOptimize(s.data());
  }
}

template <bool Parallel>
void BM_LossAndGrads(benchmark::State& state) {
  auto& f = fixture();
  const std::span<const BatchItem> batch(f.items.data(), 64);
  for (auto _ : state) {
    auto g = Parallel ? kernels::loss_and_grads(f.params, batch) : reference::loss_and_grads(f.params, batch);
    benchmark::DoNotOptimize(g.grads.data());
  }
}

template <bool Parallel>
void BM_ForwardAll(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) {
    auto p = Parallel ? kernels::forward_all(f.params, f.items) : reference::forward_all(f.params, f.items);
    benchmark::DoNotOptimize(p.data());
  }
}

BENCHMARK(BM_Refresh<false>)->Name("refresh/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Refresh<true>)->Name("refresh/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GeoCandidates<false>)->Name("geo_candidates/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GeoCandidates<true>)->Name("geo_candidates/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sample<false>)->Name("sample_comparables/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sample<true>)->Name("sample_comparables/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LossAndGrads<false>)->Name("loss_and_grads_b64/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LossAndGrads<true>)->Name("loss_and_grads_b64/openmp")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ForwardAll<false>)->Name("forward_all/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardAll<true>)->Name("forward_all/openmp")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
