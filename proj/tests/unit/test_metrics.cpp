#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <map>
#include <numeric>
#include <stdexcept>

#include "../support/fixtures.hpp"
#include "rea/baselines.hpp"
#include "rea/error.hpp"
#include "rea/metrics.hpp"
#include "rea/sweep.hpp"

namespace rea {
namespace {

TEST(Abre, ClosedForms) {
  EXPECT_NEAR(abre(100.0, 110.0), 0.10, 1e-15);
  EXPECT_EQ(abre(50.0, 100.0), 1.0);
  EXPECT_EQ(abre(100.0, 50.0), 1.0);
  EXPECT_EQ(abre(7.0, 7.0), 0.0);
  EXPECT_THROW(abre(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(abre(1.0, -2.0), std::invalid_argument);
}

TEST(Abre, SymmetricAndDominatesMaxNormalized) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1e-3, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng), y = u(rng);
    EXPECT_EQ(abre(x, y), abre(y, x));
    EXPECT_GE(abre(x, y), std::abs(x - y) / std::max(x, y));
    EXPECT_GE(abre(x, y), 0.0);
  }
}

TEST(Median, OddEvenAndErrors) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_EQ(median({5.0}), 5.0);
  EXPECT_THROW(median({}), std::invalid_argument);
  const std::vector<double> p = {1, 2, 3, 4}, t = {0, 0, 0, 0};
  EXPECT_EQ(mdae(p, t), 2.5);
  EXPECT_THROW(mdae(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(mdabre(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

// Hand-computed fixture (pred, truth):
//   (105,100)  AE 5   ABRE 5/100  = 0.05
//   (80,100)   AE 20  ABRE 20/80  = 0.25
//   (230,250)  AE 20  ABRE 20/230 = 2/23
//   (300,240)  AE 60  ABRE 60/240 = 0.25
//   (1000,1005) AE 5  ABRE 5/1000 = 0.005
//   (50,100)   AE 50  ABRE 50/50  = 1
//   (400,400)  AE 0   ABRE 0
// Sorted AE: 0 5 5 20 20 50 60 -> 20. Sorted ABRE: 0 .005 .05 2/23 .25 .25 1 -> 2/23.
// Without the last pair: AE 5 5 20 20 50 60 -> 20; ABRE .005 .05 2/23 .25 .25 1 -> (2/23 + 1/4)/2.
TEST(Metrics, SevenPairFixture) {
  const std::vector<double> pred = {105, 80, 230, 300, 1000, 50, 400};
  const std::vector<double> truth = {100, 100, 250, 240, 1005, 100, 400};
  EXPECT_NEAR(mdae(pred, truth), 20.0, 1e-12);
  EXPECT_NEAR(mdabre(pred, truth), 2.0 / 23.0, 1e-12);
  const std::span<const double> p6(pred.data(), 6), t6(truth.data(), 6);
  EXPECT_NEAR(mdae(p6, t6), 20.0, 1e-12);
  EXPECT_NEAR(mdabre(p6, t6), (2.0 / 23.0 + 0.25) / 2.0, 1e-12);
  const auto r = make_report(pred, truth, {{"tag", "x"}});
  EXPECT_EQ(r.n, 7u);
  EXPECT_EQ(to_json(r)["mdabre_percent"].get<double>(), 100.0 * r.mdabre);
  EXPECT_EQ(to_json(r)["config"]["tag"], "x");
}

TEST(Metrics, PerfectPredictionAndPermutationInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(10.0, 1000.0);
  std::vector<double> p(101), t(101);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = u(rng);
    t[i] = u(rng);
  }
  EXPECT_EQ(mdae(t, t), 0.0);
  EXPECT_EQ(mdabre(t, t), 0.0);
  const double a = mdae(p, t), b = mdabre(p, t);
  std::vector<std::size_t> perm(p.size());
  std::iota(perm.begin(), perm.end(), 0u);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pp, tt;
    for (auto i : perm) {
      pp.push_back(p[i]);
      tt.push_back(t[i]);
    }
    EXPECT_EQ(mdae(pp, tt), a);
    EXPECT_EQ(mdabre(pp, tt), b);
  }
}

TEST(MeanCi, FormulaAndSingleSeed) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const auto ci = mean_ci95(v);
  EXPECT_EQ(ci.n, 4u);
  EXPECT_DOUBLE_EQ(ci.mean, 2.5);
  EXPECT_NEAR(ci.ci95, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(mean_ci95(std::vector<double>{7.0}).ci95, 0.0);
}

TEST(LinearRegression, MatchesEigenLeastSquares) {
  std::mt19937_64 rng(5);
  const std::size_t n = 200, f = 5;
  const auto x = testing::random_vector(rng, n * f);
  const auto y = testing::random_vector(rng, n, 3.0);
  const auto model = fit_linear(x, n, f, y);
  Eigen::MatrixXd a(n, f + 1);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (std::size_t j = 0; j < f; ++j) a(i, j + 1) = x[i * f + j];
    b(i) = y[i];
  }
  const Eigen::VectorXd w = a.colPivHouseholderQr().solve(b);
  EXPECT_NEAR(model.intercept, w(0), 1e-6);
  for (std::size_t j = 0; j < f; ++j) EXPECT_NEAR(model.coef[j], w(j + 1), 1e-6);
}

TEST(LinearRegression, SingularThrowsAndConstantFeatureGivesMean) {
  const std::vector<double> x = {1, 1, 1, 1};
  const std::vector<double> y = {1, 2, 3, 6};
  const auto m = fit_linear(x, 4, 1, y, 1e-8);
  EXPECT_NEAR(m.predict(std::vector<double>{1.0}), 3.0, 1e-6);
  EXPECT_THROW(fit_linear(x, 4, 1, y, 0.0), RuntimeError);
  EXPECT_THROW(fit_linear(x, 3, 1, y), ValidationError);
}

TEST(LinearRegression, ExactlyLinearDataHasZeroError) {
  SynthConfig c;
  c.n = 600;
  c.spatial_amplitude = 0.0;
  c.noise = 0.0;
  // Unit price scale: the 1e-8 ridge jitter shifts log predictions by about
  // 1e-10, which stays far below 1e-6 only when prices are of order one.
  c.base_log_price = 0.0;
  const auto data = generate_synthetic(c);
  const auto split = temporal_split(data.dataset, 1.0, 0.8, 0.1);
  const Problem p = Problem::prepare(data.dataset, split, Variant::rea, TargetKind::log_price);
  const auto r = baseline_linear(p, Partition::test);
  EXPECT_LT(r.mdae, 1e-6);
  EXPECT_EQ(r.config["model"], "LR");
}

TEST(LinearRegression, ConstantFeaturePredictsTrainMean) {
  std::vector<PropertyRecord> records;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> price(1e5, 5e5);
  for (int i = 0; i < 50; ++i) records.push_back({i + 1, 45.0, 5.0 + 0.01 * i, 17000 + i, price(rng), std::nullopt, {3.0}});
  const Dataset d(testing::feature_names(1), records);
  const auto split = random_split(d, 1, 0.6, 0.2);
  const Problem p = Problem::prepare(d, split, Variant::rea, TargetKind::log_price);
  double mean = 0.0;
  for (auto r : p.rows(Partition::train)) mean += p.value(r);
  mean /= static_cast<double>(p.rows(Partition::train).size());
  const auto r = baseline_linear(p, Partition::test);
  // Every prediction is exp(mean); the median error is against the test prices.
  std::vector<double> pred, truth;
  for (auto row : p.rows(Partition::test)) {
    pred.push_back(std::exp(mean));
    truth.push_back(d[row].price);
  }
  // The ridge jitter perturbs the intercept by about 1e-9 in log space.
  EXPECT_NEAR(r.mdae, mdae(pred, truth), 1e-7 * 5e5);
}

class KnnBaseline : public ::testing::Test {
 protected:
  void SetUp() override {
    dataset_.emplace(testing::random_dataset(300, 3, 8));
    split_ = random_split(*dataset_, 2, 0.7, 0.15);
    problem_.emplace(Problem::prepare(*dataset_, split_, Variant::rea, TargetKind::log_price));
  }
  std::optional<Dataset> dataset_;
  SplitSpec split_;
  std::optional<Problem> problem_;
};

TEST_F(KnnBaseline, MatchesBruteForce) {
  const auto& d = *dataset_;
  for (auto t : problem_->rows(Partition::test)) {
    std::vector<std::pair<double, RecordId>> cands;
    std::map<RecordId, std::size_t> row_of;
    for (auto r : problem_->pool_rows()) {
      cands.push_back({haversine(d[t].lat, d[t].lon, d[r].lat, d[r].lon), d[r].id});
      row_of[d[r].id] = r;
    }
    std::sort(cands.begin(), cands.end());
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += std::log(d[row_of[cands[i].second]].price);
    EXPECT_NEAR(knn_predict(*problem_, t, 5, KnnSpace::geo), std::exp(sum / 5.0), 1e-6);
  }
}

TEST_F(KnnBaseline, KOneIsNearestOtherAndKAllIsGlobalMean) {
  const auto& d = *dataset_;
  const auto pool = problem_->pool_rows();
  double all = 0.0;
  for (auto r : pool) all += problem_->value(r);
  for (auto t : problem_->rows(Partition::train)) {
    std::size_t best = pool.front() == t ? pool[1] : pool.front();
    double best_d = 1e300;
    for (auto r : pool) {
      if (r == t) continue;
      const double dist = haversine(d[t].lat, d[t].lon, d[r].lat, d[r].lon);
      if (dist < best_d || (dist == best_d && d[r].id < d[best].id)) {
        best_d = dist;
        best = r;
      }
    }
    EXPECT_NEAR(knn_predict(*problem_, t, 1, KnnSpace::geo), d[best].price, 1e-6 * d[best].price);
    const double others = (all - problem_->value(t)) / static_cast<double>(pool.size() - 1);
    EXPECT_NEAR(std::log(knn_predict(*problem_, t, pool.size(), KnnSpace::geo)), others, 1e-12);
  }
}

TEST_F(KnnBaseline, IdentityOracleWithoutFilters) {
  const GeoIndex index(*dataset_);
  std::vector<double> values(dataset_->size());
  for (std::size_t r = 0; r < values.size(); ++r) values[r] = (*dataset_)[r].price;
  for (std::size_t r = 0; r < dataset_->size(); ++r) {
    EXPECT_EQ(knn_mean_value(index, values, (*dataset_)[r], 1, RetrievalFilter{}), values[r]);
  }
  EXPECT_THROW(knn_mean_value(index, values, (*dataset_)[0], 0, RetrievalFilter{}), ValidationError);
}

TEST_F(KnnBaseline, FeatureSpaceBruteForce) {
  for (auto t : problem_->rows(Partition::val)) {
    const auto xt = problem_->scaled_features(t);
    std::vector<std::pair<double, RecordId>> cands;
    std::map<RecordId, std::size_t> row_of;
    for (auto r : problem_->pool_rows()) {
      const auto xr = problem_->scaled_features(r);
      double d2 = 0.0;
      for (std::size_t j = 0; j < xt.size(); ++j) d2 += (xt[j] - xr[j]) * (xt[j] - xr[j]);
      cands.push_back({d2, (*dataset_)[r].id});
      row_of[(*dataset_)[r].id] = r;
    }
    std::sort(cands.begin(), cands.end());
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += problem_->value(row_of[cands[i].second]);
    EXPECT_NEAR(knn_predict(*problem_, t, 3, KnnSpace::feature), std::exp(sum / 3.0), 1e-6);
  }
  EXPECT_EQ(knn_space_from_string("feature"), KnnSpace::feature);
  EXPECT_THROW(knn_space_from_string("latent"), ValidationError);
}

TEST(Redundancy, DistinctDuplicatedAndInjected) {
  const auto d = testing::random_dataset(200, 2, 4);
  EXPECT_EQ(redundancy_report(d).fraction, 0.0);

  std::vector<PropertyRecord> doubled;
  for (std::size_t r = 0; r < d.size(); ++r) {
    doubled.push_back(d[r]);
    auto copy = d[r];
    copy.id += 1000;
    doubled.push_back(copy);
  }
  EXPECT_EQ(redundancy_report(Dataset(testing::feature_names(2), doubled)).fraction, 1.0);

  // 540 distinct records plus exact copies of 60 of them: 120 of 600 flagged.
  const auto base = testing::random_dataset(540, 2, 6);
  std::vector<PropertyRecord> injected;
  for (std::size_t r = 0; r < base.size(); ++r) injected.push_back(base[r]);
  for (std::size_t r = 0; r < 60; ++r) {
    auto copy = base[r * 9];
    copy.id += 10000;
    injected.push_back(copy);
  }
  const auto rep = redundancy_report(Dataset(testing::feature_names(2), injected));
  EXPECT_NEAR(rep.fraction, 0.20, 0.01);
  EXPECT_EQ(rep.flags.size(), 600u);
}

TEST(Sweep, SingleCellAndCsvLayout) {
  const auto data = testing::small_synthetic(500, 2);
  const auto split = temporal_split(data.dataset, 2.0, 0.7, 0.15);
  TrainConfig base;
  base.epochs = 2;
  base.embed_dim = 4;
  base.encoder_hidden = {4};
  SweepSpec spec;
  spec.modes = {RetrievalMode::geo_only};
  spec.k1_values = {2};
  spec.seeds = {0};
  const auto rows = sweep_retrieval(data.dataset, split, TargetKind::log_price, base, spec);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].total_comparables, 4u);
  EXPECT_EQ(rows[0].mode, RetrievalMode::geo_only);

  const auto csv = sweep_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "mode,total_comparables,seed,mdae,mdabre");
  const auto summary = summarize(rows);
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].mdabre.n, 1u);
  const auto scsv = summary_csv(summary);
  EXPECT_EQ(scsv.substr(0, scsv.find('\n')),
            "mode,total_comparables,n_seeds,mdae_mean,mdae_ci95,mdabre_mean,mdabre_ci95");
  EXPECT_EQ(sweep_retrieval(data.dataset, split, TargetKind::log_price, base, spec)[0].mdabre,
            rows[0].mdabre);
}

TEST(Sweep, SummaryGroupsSeedsInFirstSeenOrder) {
  std::vector<SweepRow> rows = {
      {RetrievalMode::vector_only, 4, 0, 10.0, 0.1}, {RetrievalMode::geo_only, 4, 0, 20.0, 0.2},
      {RetrievalMode::vector_only, 4, 1, 12.0, 0.3}, {RetrievalMode::geo_only, 4, 1, 22.0, 0.4}};
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].mode, RetrievalMode::vector_only);
  EXPECT_DOUBLE_EQ(s[0].mdae.mean, 11.0);
  EXPECT_DOUBLE_EQ(s[1].mdabre.mean, 0.3);
  EXPECT_EQ(s[1].mdabre.n, 2u);
}

TEST(Sweep, ComparisonCsvHeader) {
  const std::vector<ModelRow> rows = {{"LR", 0, 5.0, 0.1}, {"REA", 0, 4.0, 0.08}, {"REA", 1, 6.0, 0.1}};
  const auto csv = comparison_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "model,n_seeds,mdae_mean,mdae_ci95,mdabre_pct_mean,mdabre_pct_ci95");
  EXPECT_NE(csv.find("REA,2,"), std::string::npos);
}

}  // namespace
}  // namespace rea
