#include "rea/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "rea/error.hpp"
#include "rea/kernels.hpp"

namespace rea {

std::string to_string(RetrievalMode mode) {
  switch (mode) {
    case RetrievalMode::geo_only: return "geo_only";
    case RetrievalMode::vector_only: return "vector_only";
    case RetrievalMode::hybrid: return "hybrid";
  }
  return "hybrid";
}

RetrievalMode retrieval_mode_from_string(std::string_view text) {
  if (text == "geo_only" || text == "geo") return RetrievalMode::geo_only;
  if (text == "vector_only" || text == "vector") return RetrievalMode::vector_only;
  if (text == "hybrid") return RetrievalMode::hybrid;
  throw ValidationError("unknown retrieval mode '" + std::string(text) + "'");
}

std::string to_string(Partition p) {
  switch (p) {
    case Partition::train: return "train";
    case Partition::val: return "val";
    case Partition::test: return "test";
  }
  return "test";
}

Partition partition_from_string(std::string_view text) {
  if (text == "train") return Partition::train;
  if (text == "val" || text == "validation") return Partition::val;
  if (text == "test") return Partition::test;
  throw ValidationError("unknown partition '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

std::size_t TrainConfig::k_geo() const {
  switch (mode) {
    case RetrievalMode::geo_only: return 2 * k1;
    case RetrievalMode::vector_only: return 0;
    case RetrievalMode::hybrid: return k1;
  }
  return k1;
}

std::size_t TrainConfig::k_vec() const {
  switch (mode) {
    case RetrievalMode::geo_only: return 0;
    case RetrievalMode::vector_only: return 2 * k1;
    case RetrievalMode::hybrid: return k1;
  }
  return k1;
}

double TrainConfig::encoder_lr(std::size_t epoch) const {
  return base_lr * std::pow(encoder_decay, static_cast<double>(epoch));
}

ModelConfig TrainConfig::model_config(std::size_t feature_dim) const {
  ModelConfig c;
  c.variant = variant;
  c.feature_dim = feature_dim;
  c.embed_dim = embed_dim;
  c.encoder_hidden = encoder_hidden;
  c.gate_hidden = gate_hidden;
  c.decoder_hidden = decoder_hidden;
  return c;
}

void TrainConfig::validate() const {
  if (k1 == 0) throw ValidationError("k1 must be at least 1");
  if (batch_size == 0) throw ValidationError("batch_size must be at least 1");
  if (!(base_lr > 0.0)) throw ValidationError("learning rate must be positive");
  if (!(encoder_decay > 0.0) || encoder_decay > 1.0) {
    throw ValidationError("encoder_decay must lie in (0, 1]");
  }
  if (embed_dim == 0) throw ValidationError("embed_dim must be at least 1");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"variant", to_string(c.variant)},
          {"mode", to_string(c.mode)},
          {"k1", c.k1},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr", c.base_lr},
          {"encoder_decay", c.encoder_decay},
          {"seed", c.seed},
          {"embed_dim", c.embed_dim},
          {"encoder_hidden", c.encoder_hidden},
          {"gate_hidden", c.gate_hidden},
          {"decoder_hidden", c.decoder_hidden},
          {"validate_each_epoch", c.validate_each_epoch}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  if (j.contains("variant")) c.variant = variant_from_string(j.at("variant").get<std::string>());
  if (j.contains("mode")) c.mode = retrieval_mode_from_string(j.at("mode").get<std::string>());
  c.k1 = j.value("k1", c.k1);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.base_lr = j.value("lr", c.base_lr);
  c.encoder_decay = j.value("encoder_decay", c.encoder_decay);
  c.seed = j.value("seed", c.seed);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.encoder_hidden = j.value("encoder_hidden", c.encoder_hidden);
  c.gate_hidden = j.value("gate_hidden", c.gate_hidden);
  c.decoder_hidden = j.value("decoder_hidden", c.decoder_hidden);
  c.validate_each_epoch = j.value("validate_each_epoch", c.validate_each_epoch);
  return c;
}

// ---------------------------------------------------------------------------

Problem::Problem(const Dataset& dataset, SplitSpec split, TargetTransform transform,
                 ScalerParams scaler)
    : Problem(dataset, split, transform, std::move(scaler), split.mode == SplitMode::temporal) {}

Problem::Problem(const Dataset& dataset, SplitSpec split, TargetTransform transform,
                 ScalerParams scaler, bool date_filter)
    : dataset_(&dataset),
      split_(std::move(split)),
      transform_(transform),
      scaler_(std::move(scaler)),
      date_filter_(date_filter) {
  split_.validate(dataset);
  if (date_filter_ && !dataset.all_dated()) {
    throw ValidationError("date filtering needs a date on every record");
  }
  const std::size_t n = dataset.size();
  const std::size_t f = dataset.feature_dim();
  if (scaler_.dim() != f) throw ValidationError("scaler dimension does not match the dataset");
  if (transform_.kind == TargetKind::log_price_per_sqm && !dataset.all_have_surface()) {
    throw ValidationError("log_price_per_sqm target needs a surface on every record");
  }
  scaled_.resize(n * f);
  values_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    scaler_.apply_into(dataset[r].features, std::span<double>(scaled_.data() + r * f, f));
    values_[r] = target_value(dataset[r], transform_);
  }
  in_pool_.assign(n, 0);
  for (RecordId id : split_.pool_ids()) {
    const std::size_t row = dataset.require_row(id);
    pool_rows_.push_back(row);
    in_pool_[row] = 1;
  }
  index_ = GeoIndex(dataset, pool_rows_);
}

Problem Problem::prepare(const Dataset& dataset, SplitSpec split, Variant variant,
                         TargetKind kind) {
  ScalerParams scaler = fit_scaler(dataset, split.train_ids);
  TargetTransform transform{kind, 1.0};
  if (variant == Variant::erea) transform = fit_normalized_transform(dataset, split.train_ids, kind);
  return Problem(dataset, std::move(split), transform, std::move(scaler));
}

std::span<const double> Problem::scaled_features(std::size_t row) const {
  const std::size_t f = feature_dim();
  return {scaled_.data() + row * f, f};
}

double Problem::unit_value(std::size_t row) const {
  const auto& r = (*dataset_)[row];
  return transform_.kind == TargetKind::log_price ? r.price : r.price / *r.surface;
}

std::vector<std::size_t> Problem::rows(Partition partition) const {
  const std::vector<RecordId>* ids = nullptr;
  switch (partition) {
    case Partition::train: ids = &split_.train_ids; break;
    case Partition::val: ids = &split_.val_ids; break;
    case Partition::test: ids = &split_.test_ids; break;
  }
  std::vector<std::size_t> out;
  out.reserve(ids->size());
  for (RecordId id : *ids) out.push_back(*dataset_->row_of(id));
  return out;
}

RetrievalFilter Problem::filter_for(std::size_t target_row) const {
  const auto& r = (*dataset_)[target_row];
  RetrievalFilter filter;
  filter.exclude_id = r.id;
  if (date_filtered()) filter.max_date = r.date;
  return filter;
}

ComparableEntry Problem::make_entry(std::size_t target_row, std::size_t comp_row,
                                    Source source) const {
  const auto& comp = (*dataset_)[comp_row];
  ComparableEntry e;
  e.id = comp.id;
  e.source = source;
  const auto f = scaled_features(comp_row);
  e.features.assign(f.begin(), f.end());
  e.relative = relative_features((*dataset_)[target_row], comp);
  e.value = values_[comp_row];
  return e;
}

// ---------------------------------------------------------------------------

std::vector<double> EmbeddingTable::query(const Problem& problem, std::size_t row) const {
  if (problem.in_pool(row)) {
    const auto z = at(row);
    return {z.begin(), z.end()};
  }
  return encoder.infer(problem.scaled_features(row));
}

void EmbeddingHistory::push(EmbeddingTable table) {
  previous = std::move(latest);
  latest = std::move(table);
  ++refreshes_;
}

const EmbeddingTable& EmbeddingHistory::for_evaluation(bool* fell_back) const {
  if (!latest) throw RuntimeError("no embedding table has been computed");
  const bool use_latest = !previous;
  if (fell_back) *fell_back = use_latest;
  return use_latest ? *latest : *previous;
}

EmbeddingTable refresh_embeddings(const ModelParams& params, const Problem& problem,
                                  std::size_t epoch) {
  return kernels::refresh_embeddings(params, problem, epoch);
}

std::vector<Neighbor> geo_candidates(const Problem& problem, std::size_t target_row,
                                     const TrainConfig& config) {
  const auto& target = problem.dataset()[target_row];
  const std::size_t k = std::max(config.k_geo(), config.pool_size());
  return problem.pool_index().knn(target.lat, target.lon, k, problem.filter_for(target_row));
}

ComparableSet sample_comparables(const Problem& problem, std::size_t target_row,
                                 const EmbeddingTable& table, std::span<const Neighbor> candidates,
                                 const TrainConfig& config) {
  const auto& target = problem.dataset()[target_row];
  if (candidates.empty()) {
    throw EmptyPoolError("target " + std::to_string(target.id) +
                         " has no admissible comparables in the retrieval pool");
  }
  ComparableSet set;
  set.target_id = target.id;
  const std::size_t n_geo = std::min(config.k_geo(), candidates.size());
  set.entries.reserve(config.total_comparables());
  for (std::size_t i = 0; i < n_geo; ++i) {
    set.entries.push_back(problem.make_entry(target_row, candidates[i].row, Source::geo));
  }

  const std::size_t pool_end = std::min(config.pool_size(), candidates.size());
  if (config.k_vec() > 0 && pool_end > n_geo) {
    const auto zq = table.query(problem, target_row);
    struct Scored {
      double score;
      RecordId id;
      std::size_t row;
    };
    std::vector<Scored> scored;
    scored.reserve(pool_end - n_geo);
    for (std::size_t i = n_geo; i < pool_end; ++i) {
      const auto zc = table.at(candidates[i].row);
      double s = 0.0;
      for (std::size_t d = 0; d < zq.size(); ++d) s += zq[d] * zc[d];
      scored.push_back({s, candidates[i].id, candidates[i].row});
    }
    const std::size_t take = std::min(config.k_vec(), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), [](const Scored& a, const Scored& b) {
                        return a.score > b.score || (a.score == b.score && a.id < b.id);
                      });
    for (std::size_t i = 0; i < take; ++i) {
      set.entries.push_back(problem.make_entry(target_row, scored[i].row, Source::vector));
    }
  }
  return set;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const EpochLog& log) {
  nlohmann::json j = {{"epoch", log.epoch},
                      {"train_mse", log.train_mse},
                      {"val_mdae", nullptr},
                      {"val_mdabre", nullptr},
                      {"encoder_lr", log.encoder_lr},
                      {"short_sets", log.short_sets},
                      {"wall_time_s", log.wall_time_s}};
  if (log.val_mdae) j["val_mdae"] = *log.val_mdae;
  if (log.val_mdabre) j["val_mdabre"] = *log.val_mdabre;
  return j;
}

std::string to_jsonl(const std::vector<EpochLog>& log, bool include_wall_time) {
  std::ostringstream out;
  for (const auto& entry : log) {
    auto j = to_json(entry);
    if (!include_wall_time) j.erase("wall_time_s");
    out << j.dump() << '\n';
  }
  return out.str();
}

TrainResult train(const Problem& problem, const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  using Clock = std::chrono::steady_clock;

  TrainResult result;
  result.params = ModelParams::create(config.model_config(problem.feature_dim()), config.seed);
  result.penultimate_params = result.params;
  ModelParams& params = result.params;

  const std::size_t n_params = params.param_count();
  AdamState optimizer(n_params, config.base_lr);
  const std::vector<std::size_t> train_rows = problem.rows(Partition::train);
  const std::vector<std::size_t> val_rows = problem.rows(Partition::val);
  const auto train_candidates = kernels::geo_candidates(problem, train_rows, config);
  // Separate stream from initialization so changing the model size does not
  // reshuffle the batches.
  std::mt19937_64 shuffle_rng(config.seed ^ 0x5DEECE66DULL);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto t0 = Clock::now();
    if (epoch + 1 == config.epochs) result.penultimate_params = params;

    EmbeddingTable table = kernels::refresh_embeddings(params, problem, epoch);
    const auto sets =
        kernels::sample_comparables(problem, train_rows, table, train_candidates, config);

    const double encoder_scale = std::pow(config.encoder_decay, static_cast<double>(epoch));
    const LrSegment segments[] = {{0, params.encoder_end(), encoder_scale},
                                  {params.encoder_end(), n_params, 1.0}};
    if (options.on_epoch) {
      options.on_epoch({epoch, encoder_scale, 1.0, &train_rows, &sets, &table});
    }

    std::vector<std::size_t> order(train_rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double sse = 0.0;
    std::vector<BatchItem> batch;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        const std::size_t k = order[i];
        batch.push_back({problem.scaled_features(train_rows[k]), &sets[k],
                         problem.value(train_rows[k])});
      }
      const auto lg = kernels::loss_and_grads(params, batch);
      if (!std::isfinite(lg.mse)) {
        throw DivergenceError("training diverged: non-finite loss at epoch " +
                              std::to_string(epoch));
      }
      sse += lg.mse * static_cast<double>(batch.size());
      auto flat = params.flatten();
      adam_step(flat, lg.grads, optimizer, segments);
      params.assign(flat);
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_mse = sse / static_cast<double>(train_rows.size());
    entry.encoder_lr = config.encoder_lr(epoch);
    for (const auto& s : sets) entry.short_sets += s.entries.size() < config.total_comparables();
    if (config.validate_each_epoch && !val_rows.empty()) {
      // The table of this epoch is the previous-to-last one once the next
      // refresh happens, which matches how the final model is evaluated.
      const auto ev = evaluate_with_table(params, table, problem, config, val_rows);
      entry.val_mdae = ev.report.mdae;
      entry.val_mdabre = ev.report.mdabre;
    }
    result.history.push(std::move(table));
    entry.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    result.log.push_back(entry);
  }
  result.history.push(kernels::refresh_embeddings(params, problem, config.epochs));
  return result;
}

Evaluation evaluate_with_table(const ModelParams& params, const EmbeddingTable& table,
                               const Problem& problem, const TrainConfig& config,
                               std::span<const std::size_t> rows) {
  if (rows.empty()) throw ValidationError("cannot evaluate an empty partition");
  const auto candidates = kernels::geo_candidates(problem, rows, config);
  auto sets = kernels::sample_comparables(problem, rows, table, candidates, config);
  std::vector<BatchItem> items;
  items.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    items.push_back({problem.scaled_features(rows[i]), &sets[i], problem.value(rows[i])});
  }
  auto preds = kernels::forward_all(params, items);

  Evaluation ev;
  std::vector<double> predicted(rows.size()), truth(rows.size());
  ev.predictions.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    predicted[i] = problem.unit_from_value(preds[i].v_star);
    truth[i] = problem.unit_value(rows[i]);
    ev.predictions.push_back({problem.dataset()[rows[i]].id, predicted[i], truth[i],
                              std::move(sets[i]), std::move(preds[i])});
  }
  ev.report = make_report(predicted, truth,
                          {{"train", to_json(config)}, {"table_epoch", table.epoch}});
  return ev;
}

Evaluation evaluate(const ModelParams& params, const EmbeddingHistory& history,
                    const Problem& problem, const TrainConfig& config, Partition partition) {
  bool fell_back = false;
  const auto& table = history.for_evaluation(&fell_back);
  const auto rows = problem.rows(partition);
  auto ev = evaluate_with_table(params, table, problem, config, rows);
  ev.used_latest_table = fell_back;
  ev.report.config["partition"] = to_string(partition);
  ev.report.config["embedding_table"] = fell_back ? "latest" : "previous_to_last";
  return ev;
}

}  // namespace rea
