#include "rea/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rea/checkpoint.hpp"
#include "rea/error.hpp"
#include "rea/kernels.hpp"

namespace rea::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw RuntimeError("failed while writing '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::vector<std::size_t> as_sizes(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
  return j.get<std::vector<std::size_t>>();
}

// Exclusive advisory lock on the output directory, released on scope exit
// and by the kernel if the process dies.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / ".rea.lock") {
    fs::create_directories(dir);
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw RuntimeError("cannot create lock file '" + path_.string() + "'");
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw RuntimeError("output directory '" + dir.string() +
                         "' is in use by another rea command (lock: " + path_.string() + ")");
    }
  }
  ~OutputLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

Dataset load_dataset(const RunConfig& config) {
  const fs::path path = config.resolved_dataset();
  if (!fs::exists(path)) throw ValidationError("dataset file not found: " + path.string());
  CsvSchema schema = config.schema;
  const auto header = read_csv_header(path);
  const auto inferred = CsvSchema::infer(header);
  if (!schema.date) schema.date = inferred.date;
  if (!schema.surface) schema.surface = inferred.surface;
  return load_csv(path, schema);
}

SplitSpec make_split(const RunConfig& config, const Dataset& dataset) {
  if (config.split.path) {
    auto split = split_from_json(read_json(*config.split.path));
    split.validate(dataset);
    return split;
  }
  const auto& p = config.split;
  if (p.mode == SplitMode::temporal) {
    if (!dataset.all_dated()) {
      throw ValidationError("temporal split needs a date for every record; set split.mode=random "
                            "or map the date column with schema.date");
    }
    return temporal_split(dataset, p.offset_years, p.train_frac, p.val_frac);
  }
  return random_split(dataset, p.seed, p.train_frac, p.val_frac);
}

fs::path checkpoint_root(const RunConfig& config) { return config.output_dir / "checkpoint"; }

struct LoadedRun {
  Dataset dataset;
  Checkpoint final_ck;
  Checkpoint penultimate_ck;
  SplitSpec split;
};

LoadedRun load_run(const RunConfig& config) {
  const fs::path root = checkpoint_root(config);
  LoadedRun run;
  run.final_ck = load_checkpoint(root / "final");
  run.penultimate_ck = load_checkpoint(root / "penultimate");
  const fs::path split_path = root / "split.json";
  if (!fs::exists(split_path)) throw ValidationError("checkpoint file not found: " + split_path.string());
  run.dataset = load_dataset(config);
  check_compatible(run.final_ck.manifest, run.dataset);
  run.split = split_from_json(read_json(split_path));
  return run;
}

// The table the final epoch trained against: the penultimate weights refreshed
// at the start of that epoch.
EmbeddingTable evaluation_table(const LoadedRun& run, const Problem& problem) {
  const std::size_t epoch = run.penultimate_ck.manifest.epoch;
  return kernels::refresh_embeddings(run.penultimate_ck.params, problem, epoch);
}

}  // namespace

fs::path RunConfig::resolved_dataset() const {
  return dataset_path ? *dataset_path : output_dir / "dataset.csv";
}

json default_config_json() {
  const CsvSchema schema;
  const SplitParams split;
  const EvalParams eval;
  const SweepParams sweep;
  json modes = json::array();
  for (auto m : sweep.retrieval.modes) modes.push_back(to_string(m));
  return {
      {"output_dir", "run"},
      {"threads", 0},
      {"dataset", {{"path", nullptr},
                   {"target", to_string(TargetKind::log_price)},
                   {"schema", {{"id", schema.id},
                               {"lat", schema.lat},
                               {"lon", schema.lon},
                               {"price", schema.price},
                               {"date", nullptr},
                               {"surface", nullptr},
                               {"features", json::array()}}}}},
      {"synth", to_json(SynthConfig{})},
      {"split", {{"mode", to_string(split.mode)},
                 {"offset_years", split.offset_years},
                 {"train_frac", split.train_frac},
                 {"val_frac", split.val_frac},
                 {"seed", split.seed},
                 {"path", nullptr}}},
      {"train", to_json(TrainConfig{})},
      {"eval", {{"partition", to_string(eval.partition)},
                {"baselines", eval.baselines},
                {"knn_k", eval.knn_k},
                {"knn_space", to_string(eval.knn_space)}}},
      {"sweep", {{"kind", sweep.kind},
                 {"modes", modes},
                 {"k1_values", sweep.retrieval.k1_values},
                 {"seeds", sweep.seeds},
                 {"retrieval_partition", to_string(sweep.retrieval.partition)},
                 {"partition", to_string(sweep.partition)},
                 {"knn_k", sweep.knn_k},
                 {"knn_space", to_string(sweep.knn_space)}}},
      {"predict", {{"target_id", nullptr}, {"record_csv", nullptr}}},
  };
}

void reject_unknown_keys(const json& defaults, const json& given, const std::string& prefix) {
  if (!given.is_object()) return;
  for (const auto& [key, value] : given.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.is_object() || !defaults.contains(key)) {
      throw ValidationError("unknown config key '" + path + "'");
    }
    const auto& def = defaults.at(key);
    // Object-valued defaults are sections; any other default (including null)
    // is a leaf whose value is checked when the section is parsed.
    if (def.is_object()) {
      if (!value.is_object()) throw ValidationError("config key '" + path + "' must be an object");
      reject_unknown_keys(def, value, path);
    }
  }
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ValidationError("malformed --set key '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    json& child = (*node)[part];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ValidationError("--set key '" + key + "' descends into a non-object");
    node = &child;
    start = dot + 1;
  }
}

RunConfig parse_run_config(const json& given) {
  const json defaults = default_config_json();
  reject_unknown_keys(defaults, given);
  json merged = defaults;
  merged.merge_patch(given);
  // merge_patch treats null as deletion; restore the nullable leaves.
  for (const auto& [section, body] : defaults.items()) {
    if (!body.is_object()) {
      if (!merged.contains(section)) merged[section] = body;
      continue;
    }
    for (const auto& [key, value] : body.items()) {
      if (!merged[section].contains(key)) merged[section][key] = value;
    }
  }
  if (!merged["dataset"]["schema"].contains("date")) merged["dataset"]["schema"]["date"] = nullptr;
  if (!merged["dataset"]["schema"].contains("surface")) merged["dataset"]["schema"]["surface"] = nullptr;

  try {
    RunConfig c;
    fs::path out = merged.at("output_dir").get<std::string>();
    if (out.is_relative()) {
      if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
        out = fs::path(root) / out;
      }
    }
    c.output_dir = out;
    c.threads = merged.at("threads").get<int>();

    const auto& d = merged.at("dataset");
    if (!d.at("path").is_null()) c.dataset_path = d.at("path").get<std::string>();
    c.target = target_kind_from_string(d.at("target").get<std::string>());
    const auto& s = d.at("schema");
    c.schema.id = s.at("id").get<std::string>();
    c.schema.lat = s.at("lat").get<std::string>();
    c.schema.lon = s.at("lon").get<std::string>();
    c.schema.price = s.at("price").get<std::string>();
    if (!s.at("date").is_null()) c.schema.date = s.at("date").get<std::string>();
    if (!s.at("surface").is_null()) c.schema.surface = s.at("surface").get<std::string>();
    c.schema.features = s.at("features").get<std::vector<std::string>>();

    c.synth = synth_config_from_json(merged.at("synth"));

    const auto& sp = merged.at("split");
    c.split.mode = split_mode_from_string(sp.at("mode").get<std::string>());
    c.split.offset_years = sp.at("offset_years").get<double>();
    c.split.train_frac = sp.at("train_frac").get<double>();
    c.split.val_frac = sp.at("val_frac").get<double>();
    c.split.seed = sp.at("seed").get<std::uint64_t>();
    if (!sp.at("path").is_null()) c.split.path = sp.at("path").get<std::string>();

    c.train = train_config_from_json(merged.at("train"));
    c.train.validate();

    const auto& ev = merged.at("eval");
    c.eval.partition = partition_from_string(ev.at("partition").get<std::string>());
    c.eval.baselines = ev.at("baselines").get<bool>();
    c.eval.knn_k = ev.at("knn_k").get<std::size_t>();
    c.eval.knn_space = knn_space_from_string(ev.at("knn_space").get<std::string>());

    const auto& sw = merged.at("sweep");
    c.sweep.kind = sw.at("kind").get<std::string>();
    if (c.sweep.kind != "retrieval" && c.sweep.kind != "models") {
      throw ValidationError("sweep.kind must be 'retrieval' or 'models', got '" + c.sweep.kind + "'");
    }
    c.sweep.retrieval.modes.clear();
    for (const auto& m : sw.at("modes")) {
      c.sweep.retrieval.modes.push_back(retrieval_mode_from_string(m.get<std::string>()));
    }
    c.sweep.retrieval.k1_values = as_sizes(sw.at("k1_values"), "sweep.k1_values");
    c.sweep.seeds = sw.at("seeds").get<std::vector<std::uint64_t>>();
    c.sweep.retrieval.seeds = c.sweep.seeds;
    c.sweep.retrieval.partition =
        partition_from_string(sw.at("retrieval_partition").get<std::string>());
    c.sweep.partition = partition_from_string(sw.at("partition").get<std::string>());
    c.sweep.knn_k = sw.at("knn_k").get<std::size_t>();
    c.sweep.knn_space = knn_space_from_string(sw.at("knn_space").get<std::string>());

    const auto& pr = merged.at("predict");
    if (!pr.at("target_id").is_null()) c.predict.target_id = pr.at("target_id").get<RecordId>();
    if (!pr.at("record_csv").is_null()) c.predict.record_csv = pr.at("record_csv").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("invalid config value: ") + e.what());
  }
}

RunConfig load_run_config(const fs::path& file, const std::vector<std::string>& sets) {
  if (!fs::exists(file)) throw ValidationError("config file not found: " + file.string());
  json given = read_json(file);
  if (!given.is_object()) throw ValidationError("config file '" + file.string() + "' must hold an object");
  for (const auto& s : sets) apply_override(given, s);
  return parse_run_config(given);
}

// ---------------------------------------------------------------------------

void cmd_gen_synth(const RunConfig& config, std::ostream& log) {
  const auto data = generate_synthetic(config.synth);
  const fs::path csv = config.resolved_dataset();
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  write_csv(data.dataset, csv);
  fs::path sidecar = csv;
  sidecar.replace_extension(".latents.json");
  write_text(sidecar, to_json(data.latents).dump(2) + "\n");
  log << "wrote " << data.dataset.size() << " records to " << csv.string() << '\n';
}

void cmd_split(const RunConfig& config, std::ostream& log) {
  const Dataset dataset = load_dataset(config);
  const SplitSpec split = make_split(config, dataset);
  write_text(config.output_dir / "split.json", to_json(split).dump(2) + "\n");
  log << "split: offset " << split.offset_ids.size() << ", train " << split.train_ids.size()
      << ", val " << split.val_ids.size() << ", test " << split.test_ids.size() << '\n';
}

void cmd_train(const RunConfig& config, std::ostream& log) {
  const Dataset dataset = load_dataset(config);
  const SplitSpec split = make_split(config, dataset);
  const Problem problem = Problem::prepare(dataset, split, config.train.variant, config.target);
  const auto result = train(problem, config.train);

  CheckpointManifest manifest;
  manifest.model = config.train.model_config(problem.feature_dim());
  manifest.train = config.train;
  manifest.transform = problem.transform();
  manifest.scaler = problem.scaler();
  manifest.feature_names = dataset.feature_names();

  const fs::path root = checkpoint_root(config);
  manifest.epoch = config.train.epochs;
  save_checkpoint(root / "final", result.params, manifest);
  // With zero epochs both checkpoints hold the initial weights.
  manifest.epoch = config.train.epochs > 0 ? config.train.epochs - 1 : 0;
  save_checkpoint(root / "penultimate", result.penultimate_params, manifest);
  write_text(root / "split.json", to_json(split).dump(2) + "\n");
  write_text(config.output_dir / "train_log.jsonl", to_jsonl(result.log));
  write_text(config.output_dir / "train_log.nowall.jsonl", to_jsonl(result.log, false));

  log << "trained " << to_string(config.train.variant) << " for " << result.log.size() << " epochs";
  if (!result.log.empty()) {
    const auto& last = result.log.back();
    log << "; final train_mse " << last.train_mse;
    if (last.val_mdabre) log << ", val MdABRE " << 100.0 * *last.val_mdabre << "%";
  }
  log << '\n';
}

void cmd_eval(const RunConfig& config, std::ostream& log) {
  const LoadedRun run = load_run(config);
  const auto& manifest = run.final_ck.manifest;
  const Problem problem(run.dataset, run.split, manifest.transform, manifest.scaler);
  const EmbeddingTable table = evaluation_table(run, problem);
  const auto rows = problem.rows(config.eval.partition);
  auto ev = evaluate_with_table(run.final_ck.params, table, problem, manifest.train, rows);
  ev.report.config["partition"] = to_string(config.eval.partition);
  ev.report.config["embedding_table"] = "previous_to_last";
  // Diagnostic pairing: the same weights retrieving with their own table.
  const EmbeddingTable latest =
      kernels::refresh_embeddings(run.final_ck.params, problem, manifest.epoch);
  const auto alt = evaluate_with_table(run.final_ck.params, latest, problem, manifest.train, rows);
  ev.report.config["latest_table"] = {{"mdae", alt.report.mdae}, {"mdabre", alt.report.mdabre}};
  const std::string name = "metrics_" + to_string(config.eval.partition) + ".json";
  write_text(config.output_dir / name, to_json(ev.report).dump(2) + "\n");
  log << to_string(manifest.model.variant) << " on " << to_string(config.eval.partition)
      << ": MdAE " << ev.report.mdae << ", MdABRE " << 100.0 * ev.report.mdabre << "% (n="
      << ev.report.n << "); latest table MdABRE " << 100.0 * alt.report.mdabre << "%\n";

  if (config.eval.baselines) {
    const Problem base = Problem::prepare(run.dataset, run.split, Variant::rea, manifest.transform.kind);
    auto lr = baseline_linear(base, config.eval.partition);
    auto knn = baseline_knn(base, config.eval.partition, config.eval.knn_k, config.eval.knn_space);
    const json out = {{"LR", to_json(lr)}, {"kNN", to_json(knn)}};
    write_text(config.output_dir / ("baselines_" + to_string(config.eval.partition) + ".json"),
               out.dump(2) + "\n");
    log << "LR MdABRE " << 100.0 * lr.mdabre << "%, kNN MdABRE " << 100.0 * knn.mdabre << "%\n";
  }
}

void cmd_sweep(const RunConfig& config, std::ostream& log) {
  const Dataset dataset = load_dataset(config);
  const SplitSpec split = make_split(config, dataset);
  if (config.sweep.kind == "retrieval") {
    const auto rows = sweep_retrieval(dataset, split, config.target, config.train, config.sweep.retrieval);
    write_text(config.output_dir / "sweep.csv", sweep_csv(rows));
    write_text(config.output_dir / "sweep_summary.csv", summary_csv(summarize(rows)));
    log << "wrote " << rows.size() << " sweep rows\n";
    return;
  }
  ComparisonSpec spec;
  spec.rea = config.train;
  spec.erea = config.train;
  spec.seeds = config.sweep.seeds;
  spec.knn_k = config.sweep.knn_k;
  spec.knn_space = config.sweep.knn_space;
  spec.partition = config.sweep.partition;
  const auto rows = compare_models(dataset, split, config.target, spec);
  std::ostringstream runs;
  runs << "model,seed,mdae,mdabre\n";
  for (const auto& r : rows) {
    runs << r.model << ',' << r.seed << ',' << format_double(r.mdae) << ','
         << format_double(r.mdabre) << '\n';
  }
  write_text(config.output_dir / "models.csv", runs.str());
  const std::string table = comparison_csv(rows);
  write_text(config.output_dir / "models_summary.csv", table);
  log << table;
}

json prediction_json(const Problem& problem, std::size_t target_row, const TargetPrediction& tp) {
  const Dataset& dataset = problem.dataset();
  const PropertyRecord& target = dataset[target_row];
  const auto& transform = problem.transform();
  const auto& entries = tp.comparables.entries;

  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ga = tp.prediction.attention[a];
    const double gb = tp.prediction.attention[b];
    return ga != gb ? ga > gb : entries[a].id < entries[b].id;
  });

  json comps = json::array();
  for (auto i : order) {
    const auto& e = entries[i];
    const PropertyRecord& rec = dataset[dataset.require_row(e.id)];
    comps.push_back({{"id", e.id},
                     {"source", to_string(e.source)},
                     {"distance_km", e.relative[0]},
                     {"time_delta_years", e.relative[1]},
                     {"date", rec.date ? json(format_iso_date(*rec.date)) : json(nullptr)},
                     {"price", rec.price},
                     {"value", e.value},
                     {"gamma", tp.prediction.attention[i]},
                     {"alpha", tp.prediction.alpha[i]}});
  }
  json out = {{"target_id", target.id},
              {"v_star", price_from_value(tp.prediction.v_star, target, transform)},
              {"v_hat", price_from_value(tp.prediction.v_hat, target, transform)},
              {"adj", tp.prediction.adj},
              {"v_star_value", tp.prediction.v_star},
              {"target_kind", to_string(transform.kind)},
              {"comparables", comps}};
  if (target.date) out["date"] = format_iso_date(*target.date);
  return out;
}

void cmd_predict(const RunConfig& config, std::ostream& log) {
  if (config.predict.target_id.has_value() == config.predict.record_csv.has_value()) {
    throw ValidationError("predict needs exactly one of predict.target_id or predict.record_csv");
  }
  LoadedRun run = load_run(config);
  const auto& manifest = run.final_ck.manifest;

  RecordId target_id = 0;
  Dataset working;
  SplitSpec split = run.split;
  if (config.predict.record_csv) {
    CsvSchema schema = config.schema;
    const auto header = read_csv_header(*config.predict.record_csv);
    const auto inferred = CsvSchema::infer(header);
    if (!schema.date) schema.date = inferred.date;
    if (!schema.surface) schema.surface = inferred.surface;
    const Dataset adhoc = load_csv(*config.predict.record_csv, schema);
    if (adhoc.size() != 1) {
      throw ValidationError(config.predict.record_csv->string() + ": expected exactly one record, got " +
                            std::to_string(adhoc.size()));
    }
    check_compatible(manifest, adhoc);
    target_id = adhoc[0].id;
    if (run.dataset.row_of(target_id)) {
      throw ValidationError("ad-hoc record id " + std::to_string(target_id) +
                            " already exists in the dataset");
    }
    std::vector<PropertyRecord> records(run.dataset.records().begin(), run.dataset.records().end());
    records.push_back(adhoc[0]);
    working = Dataset(run.dataset.feature_names(), std::move(records));
    split.test_ids.push_back(target_id);
    // The record is only a query, so the chronological partition check is
    // dropped while the strictly-older comparable filter stays on.
    split.mode = SplitMode::random;
  } else {
    target_id = *config.predict.target_id;
    if (!run.dataset.row_of(target_id)) {
      throw ValidationError("unknown target id " + std::to_string(target_id));
    }
    working = std::move(run.dataset);
  }

  const Problem problem(working, split, manifest.transform, manifest.scaler,
                        run.split.mode == SplitMode::temporal);
  const std::size_t row = working.require_row(target_id);
  const EmbeddingTable table = evaluation_table(run, problem);
  const auto candidates = geo_candidates(problem, row, manifest.train);
  ComparableSet set = sample_comparables(problem, row, table, candidates, manifest.train);
  if (set.entries.empty()) {
    throw EmptyPoolError("no admissible comparables for target " + std::to_string(target_id));
  }
  TargetPrediction tp;
  tp.target_id = target_id;
  tp.prediction = model_forward(run.final_ck.params, problem.scaled_features(row), set);
  tp.comparables = std::move(set);
  const json out = prediction_json(problem, row, tp);
  write_text(config.output_dir / ("prediction_" + std::to_string(target_id) + ".json"),
             out.dump(2) + "\n");
  log << out.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Retrieval-based property valuation"};
  app.require_subcommand(1, 1);
  std::string config_file;
  std::vector<std::string> sets;
  struct Command {
    const char* name;
    const char* help;
    void (*fn)(const RunConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"gen-synth", "generate a synthetic dataset", cmd_gen_synth},
      {"split", "write the train/val/test split", cmd_split},
      {"train", "train a model and write checkpoints", cmd_train},
      {"eval", "evaluate a checkpoint", cmd_eval},
      {"sweep", "retrieval sweep or model comparison table", cmd_sweep},
      {"predict", "predict one property and list its comparables", cmd_predict},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_file, "JSON run configuration")->required();
    sub->add_option("--set", sets, "override a config value, e.g. train.epochs=10");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    const RunConfig config = load_run_config(config_file, sets);
    kernels::set_threads(config.threads);
    const OutputLock lock(config.output_dir);
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) c.fn(config, out);
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const RuntimeError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace rea::cli
