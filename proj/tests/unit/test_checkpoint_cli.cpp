#include <gtest/gtest.h>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "../support/fixtures.hpp"
#include "rea/checkpoint.hpp"
#include "rea/cli.hpp"
#include "rea/error.hpp"
#include "rea/param_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rea {
namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rea_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& command, const fs::path& config, std::vector<std::string> sets = {}) {
  std::vector<std::string> args = {"rea", command, "--config", config.string()};
  for (auto& s : sets) {
    args.push_back("--set");
    args.push_back(s);
  }
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

TEST(ParamIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(4);
  TrainConfig t;
  t.variant = Variant::erea;
  const auto params = ModelParams::create(t.model_config(7), 3);
  const auto bytes = encode_params(params.named_stacks());
  EXPECT_EQ(bytes.substr(0, 8), "REAPARAM");
  const auto back = ModelParams::from_named_stacks(Variant::erea, kRelativeDim, decode_params(bytes));
  EXPECT_EQ(back.flatten(), params.flatten());
  EXPECT_THROW(decode_params(bytes.substr(0, bytes.size() - 3)), std::exception);
  EXPECT_THROW(decode_params("NOTPARAMxxxxxxxx"), std::exception);
}

TEST(Checkpoint, SaveLoadAndMissingPath) {
  const auto dir = fresh_dir("ckpt");
  TrainConfig t;
  t.variant = Variant::erea;
  CheckpointManifest m;
  m.model = t.model_config(4);
  m.train = t;
  m.feature_names = testing::feature_names(4);
  m.epoch = 12;
  m.transform.scale = 12.5;
  const auto params = ModelParams::create(m.model, 9);
  save_checkpoint(dir / "final", params, m);
  const auto ck = load_checkpoint(dir / "final");
  EXPECT_EQ(ck.params.flatten(), params.flatten());
  EXPECT_EQ(ck.manifest.epoch, 12u);
  EXPECT_EQ(ck.manifest.transform.scale, 12.5);
  EXPECT_EQ(to_json(ck.manifest), to_json(m));
  EXPECT_NO_THROW(check_compatible(ck.manifest, testing::random_dataset(5, 4, 1)));
  EXPECT_THROW(check_compatible(ck.manifest, testing::random_dataset(5, 3, 1)), ValidationError);
  try {
    load_checkpoint(dir / "absent");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("absent"), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(Config, UnknownKeysAndOverrides) {
  const auto defaults = cli::default_config_json();
  json given = {{"train", {{"epochs", 3}, {"bogus", 1}}}};
  try {
    cli::reject_unknown_keys(defaults, given);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("train.bogus"), std::string::npos);
  }
  json cfg = json::object();
  cli::apply_override(cfg, "train.epochs=7");
  cli::apply_override(cfg, "train.variant=EREA");
  cli::apply_override(cfg, "output_dir=/tmp/x");
  EXPECT_EQ(cfg["train"]["epochs"], 7);
  EXPECT_EQ(cfg["train"]["variant"], "EREA");
  const auto rc = cli::parse_run_config(cfg);
  EXPECT_EQ(rc.train.epochs, 7u);
  EXPECT_EQ(rc.train.variant, Variant::erea);
  EXPECT_EQ(rc.output_dir, fs::path("/tmp/x"));
  EXPECT_EQ(rc.resolved_dataset(), fs::path("/tmp/x/dataset.csv"));
  EXPECT_EQ(rc.train.k1, 5u);
  EXPECT_THROW(cli::apply_override(cfg, "no_equals_sign"), ValidationError);
}

class CliPipeline : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fresh_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    config_ = write_config(dir_, {{"output_dir", dir_.string()},
                                  {"synth", {{"n", 500}, {"seed", 2}}},
                                  {"split", {{"offset_years", 2.0}}},
                                  {"train", {{"variant", "EREA"}, {"epochs", 2}, {"k1", 3},
                                             {"embed_dim", 8}, {"encoder_hidden", {8}}}}});
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  fs::path config_;
};

TEST_F(CliPipeline, SplitIsDeterministic) {
  ASSERT_EQ(run_cli("gen-synth", config_).code, 0);
  ASSERT_EQ(run_cli("split", config_).code, 0);
  const auto first = slurp(dir_ / "split.json");
  ASSERT_EQ(run_cli("split", config_).code, 0);
  EXPECT_EQ(first, slurp(dir_ / "split.json"));
  const auto split = split_from_json(json::parse(first));
  EXPECT_EQ(split.mode, SplitMode::temporal);
  EXPECT_FALSE(split.offset_ids.empty());
}

TEST_F(CliPipeline, EvalWithoutCheckpointIsExitOne) {
  ASSERT_EQ(run_cli("gen-synth", config_).code, 0);
  const auto r = run_cli("eval", config_);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("checkpoint"), std::string::npos);
  EXPECT_EQ(run_cli("train", config_, {"train.bogus=1"}).code, 1);
  EXPECT_EQ(run_cli("nonsense", config_).code, 1);
}

TEST_F(CliPipeline, TrainEvalPredict) {
  ASSERT_EQ(run_cli("gen-synth", config_).code, 0);
  ASSERT_EQ(run_cli("train", config_).code, 0);
  for (const char* f : {"checkpoint/final/manifest.json", "checkpoint/final/params.bin",
                        "checkpoint/penultimate/params.bin", "checkpoint/split.json",
                        "train_log.jsonl", "train_log.nowall.jsonl"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  EXPECT_EQ(load_checkpoint(dir_ / "checkpoint/penultimate").manifest.epoch, 1u);
  ASSERT_EQ(run_cli("eval", config_, {"eval.baselines=true"}).code, 0);
  const auto metrics = json::parse(slurp(dir_ / "metrics_test.json"));
  EXPECT_EQ(metrics["config"]["embedding_table"], "previous_to_last");
  EXPECT_GT(metrics["n"].get<int>(), 0);
  EXPECT_TRUE(fs::exists(dir_ / "baselines_test.json"));

  const auto split = split_from_json(json::parse(slurp(dir_ / "checkpoint/split.json")));
  const RecordId target = split.test_ids.front();
  ASSERT_EQ(run_cli("predict", config_, {"predict.target_id=" + std::to_string(target)}).code, 0);
  const auto pred = json::parse(slurp(dir_ / ("prediction_" + std::to_string(target) + ".json")));
  double sum = 0.0, v_hat = 0.0, prev = 2.0;
  const auto target_date = parse_iso_date(pred["date"].get<std::string>());
  for (const auto& c : pred["comparables"]) {
    const double g = c["gamma"].get<double>();
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, prev);
    prev = g;
    sum += g;
    v_hat += g * c["value"].get<double>();
    EXPECT_LT(parse_iso_date(c["date"].get<std::string>()), target_date);
    EXPECT_NE(c["id"].get<RecordId>(), target);
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  const double adj = pred["adj"].get<double>();
  EXPECT_NEAR(pred["v_star_value"].get<double>(), (1.0 + adj) * v_hat, 1e-12);
  EXPECT_EQ(run_cli("predict", config_, {"predict.target_id=999999"}).code, 1);
}

TEST_F(CliPipeline, SingleAdmissibleComparableGetsAllWeight) {
  // Ten records one day apart and a one-day offset holding record 1: record 2,
  // the first training record, has exactly one strictly older pool record.
  std::vector<PropertyRecord> records;
  for (int i = 0; i < 10; ++i) {
    records.push_back({i + 1, 45.0 + 0.01 * i, 5.0, 17000 + i, 1e5 * (1 + i), std::nullopt, {double(i), 1.0 - i}});
  }
  write_csv(Dataset(testing::feature_names(2), records), dir_ / "tiny.csv");
  const auto cfg = write_config(
      dir_, {{"output_dir", dir_.string()},
             {"dataset", {{"path", (dir_ / "tiny.csv").string()}, {"schema", {{"date", "date"}}}}},
             {"split", {{"offset_years", 1.0 / 365.25}, {"train_frac", 0.6}, {"val_frac", 0.2}}},
             {"train", {{"epochs", 1}, {"k1", 1}, {"batch_size", 2}}},
             {"predict", {{"target_id", 2}}}});
  ASSERT_EQ(run_cli("train", cfg).code, 0) << run_cli("train", cfg).err;
  const auto r = run_cli("predict", cfg);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pred = json::parse(slurp(dir_ / "prediction_2.json"));
  ASSERT_EQ(pred["comparables"].size(), 1u);
  EXPECT_EQ(pred["comparables"][0]["id"], 1);
  EXPECT_EQ(pred["comparables"][0]["gamma"].get<double>(), 1.0);
  EXPECT_NEAR(pred["v_star"].get<double>(), 1e5, 1e-6);
  // The offset record has nothing older: runtime failure, exit 2.
  EXPECT_EQ(run_cli("predict", cfg, {"predict.target_id=1"}).code, 2);
}

TEST_F(CliPipeline, HeldLockIsExitTwo) {
  const int fd = ::open((dir_ / ".rea.lock").c_str(), O_CREAT | O_RDWR, 0644);
  ASSERT_GE(fd, 0);
  ASSERT_EQ(::flock(fd, LOCK_EX | LOCK_NB), 0);
  const auto r = run_cli("gen-synth", config_);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("in use"), std::string::npos);
  ::flock(fd, LOCK_UN);
  ::close(fd);
  EXPECT_EQ(run_cli("gen-synth", config_).code, 0);
}

}  // namespace
}  // namespace rea
