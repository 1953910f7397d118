#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support/fixtures.hpp"
#include "rea/error.hpp"
#include "rea/model.hpp"

namespace rea {
namespace {

using testing::random_set;
using testing::random_vector;

ModelConfig toy_config(Variant v, std::size_t f = 6, std::size_t d = 8) {
  ModelConfig c;
  c.variant = v;
  c.feature_dim = f;
  c.embed_dim = d;
  c.encoder_hidden = {8};
  return c;
}

// Glorot init plus small random perturbation everywhere, so biases and the
// zero-initialized decoder output layer are exercised too.
ModelParams perturbed(const ModelConfig& c, std::uint64_t seed) {
  auto p = ModelParams::create(c, seed);
  std::mt19937_64 rng(seed + 1000);
  auto flat = p.flatten();
  const auto noise = random_vector(rng, flat.size(), 0.15);
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] += noise[i];
  p.assign(flat);
  return p;
}

GradientClosure loss_closure(const ModelParams& base, const std::vector<BatchItem>& batch) {
  return [base, &batch](std::span<const double> flat, std::span<double> grad) {
    ModelParams p = base;
    p.assign(flat);
    const auto lg = loss_and_grads(p, batch);
    std::copy(lg.grads.begin(), lg.grads.end(), grad.begin());
    return lg.mse;
  };
}

TEST(ModelParams, ShapesAndCounts) {
  const auto rea = ModelParams::create(toy_config(Variant::rea), 1);
  EXPECT_FALSE(rea.gate.has_value());
  EXPECT_FALSE(rea.decoder.has_value());
  const auto erea = ModelParams::create(toy_config(Variant::erea), 1);
  ASSERT_TRUE(erea.gate && erea.decoder);
  EXPECT_EQ(erea.gate->input_dim(), 2u * 6 + 2 + 1);
  EXPECT_EQ(erea.decoder->input_dim(), (6u + 2 + 1) + 6);
  EXPECT_EQ(erea.param_count(),
            rea.param_count() + erea.gate->param_count() + erea.decoder->param_count());

  ModelConfig linear = toy_config(Variant::rea, 5, 3);
  linear.encoder_hidden = {};
  EXPECT_EQ(param_count(ModelParams::create(linear, 0)), (5u + 1) * 3);
}

TEST(ModelParams, DefaultReaBudget) {
  for (std::size_t f = 8; f <= 22; ++f) {
    ModelConfig c;
    c.feature_dim = f;
    const auto n = param_count(ModelParams::create(c, 0));
    EXPECT_LE(n, 2000u);
    EXPECT_EQ(n, f * 16 + 16 + 16 * 16 + 16);
  }
}

TEST(ModelParams, FlattenAssignRoundTrip) {
  const auto p = perturbed(toy_config(Variant::erea), 3);
  ModelParams q = ModelParams::create(toy_config(Variant::erea), 9);
  q.assign(p.flatten());
  EXPECT_EQ(q.flatten(), p.flatten());
  EXPECT_THROW(q.assign(std::vector<double>(3)), std::invalid_argument);
}

TEST(Encode, ZeroWeightsGiveZeroEmbedding) {
  auto p = ModelParams::create(toy_config(Variant::rea), 1);
  p.assign(std::vector<double>(p.param_count(), 0.0));
  for (double z : encode(p, std::vector<double>(6, 1.5))) EXPECT_EQ(z, 0.0);
}

TEST(Encode, SharedEncoderAndCrossCheck) {
  const auto p = perturbed(toy_config(Variant::erea), 2);
  std::mt19937_64 rng(5);
  const auto x = random_vector(rng, 6);
  EXPECT_EQ(encode(p, x), encode(p, x));
  EXPECT_EQ(encode(p, x), p.encoder.forward(x).output);
}

TEST(Attention, DotProducts) {
  const std::vector<double> zt = {1.0, 0.0, 2.0};
  const std::vector<std::vector<double>> zs = {{0.0, 5.0, 0.0}, {1.0, 0.0, 2.0}, {0.5, -1.0, 0.25}};
  const auto a = attention_scores(zt, zs);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_EQ(a[1], 5.0);
  EXPECT_DOUBLE_EQ(a[2], 0.5 + 0.5);
}

TEST(Gate, SaturatedAndHalf) {
  auto p = perturbed(toy_config(Variant::erea), 4);
  std::mt19937_64 rng(1);
  const auto set = random_set(rng, 5, 6);
  const auto ft = random_vector(rng, 6);
  const auto alpha = random_vector(rng, 5);
  auto& gate = *p.gate;
  const std::size_t last = gate.layers().size() - 1;

  for (auto& w : gate.weight(last)) w = 0.0;
  gate.bias(last)[0] = 0.0;
  auto beta = gated_scores(p, alpha, ft, set.entries);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(beta[i], 0.5 * alpha[i]);

  gate.bias(last)[0] = 800.0;
  beta = gated_scores(p, alpha, ft, set.entries);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(beta[i], alpha[i]);

  const auto rea = ModelParams::create(toy_config(Variant::rea), 1);
  EXPECT_THROW(gated_scores(rea, alpha, ft, set.entries), std::logic_error);
}

TEST(Gate, MatchesStackComposition) {
  const auto p = perturbed(toy_config(Variant::erea), 5);
  std::mt19937_64 rng(2);
  const auto set = random_set(rng, 4, 6);
  const auto ft = random_vector(rng, 6);
  const auto alpha = random_vector(rng, 4);
  const auto beta = gated_scores(p, alpha, ft, set.entries);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> in(ft);
    const auto& e = set.entries[i];
    in.insert(in.end(), e.features.begin(), e.features.end());
    in.insert(in.end(), e.relative.begin(), e.relative.end());
    in.push_back(e.value);
    const double g = p.gate->infer(in)[0];
    EXPECT_GT(g, 0.0);
    EXPECT_LT(g, 1.0);
    EXPECT_EQ(beta[i], alpha[i] * g);
  }
}

TEST(Aggregate, UniformSingleAndWeighted) {
  std::mt19937_64 rng(3);
  const auto set = random_set(rng, 6, 3);
  const std::vector<double> uniform(6, 1.0 / 6.0);
  double mean = 0.0;
  for (const auto& e : set.entries) mean += e.value / 6.0;
  EXPECT_NEAR(aggregate(uniform, set.entries).v_hat, mean, 1e-14);

  const std::vector<ComparableEntry> one = {set.entries[2]};
  const auto a1 = aggregate(std::vector<double>{1.0}, one);
  EXPECT_EQ(a1.v_hat, one[0].value);
  std::vector<double> concat(one[0].features);
  concat.insert(concat.end(), one[0].relative.begin(), one[0].relative.end());
  concat.push_back(one[0].value);
  EXPECT_EQ(a1.features, concat);

  auto w = softmax(random_vector(rng, 6));
  const auto agg = aggregate(w, set.entries);
  for (std::size_t j = 0; j < 3; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i) s += w[i] * set.entries[i].features[j];
    EXPECT_NEAR(agg.features[j], s, 1e-14);
  }
  EXPECT_THROW(aggregate(std::vector<double>{}, {}), EmptyPoolError);
}

TEST(Adjust, ZeroDecoderLimitAndCrossCheck) {
  auto p = perturbed(toy_config(Variant::erea), 6);
  std::mt19937_64 rng(4);
  const auto agg = random_vector(rng, 9);
  const auto ft = random_vector(rng, 6);

  auto flat = p.flatten();
  std::fill(flat.begin() + static_cast<std::ptrdiff_t>(p.gate_end()), flat.end(), 0.0);
  ModelParams zero = p;
  zero.assign(flat);
  const auto a0 = adjust(zero, agg, ft, 1.3);
  EXPECT_EQ(a0.adj, 0.0);
  EXPECT_EQ(a0.v_star, 1.3);

  ModelParams big = zero;
  big.decoder->bias(big.decoder->layers().size() - 1)[0] = 1e3;
  const double high = adjust(big, agg, ft, 1.3).v_star;
  EXPECT_NEAR(high, 2.0 * 1.3, 1e-11);
  EXPECT_LT(high, 2.0 * 1.3);
  big.decoder->bias(big.decoder->layers().size() - 1)[0] = -1e3;
  const double low = adjust(big, agg, ft, 1.3).v_star;
  EXPECT_NEAR(low, 0.0, 1e-11);
  EXPECT_GT(low, 0.0);

  std::vector<double> in(agg);
  in.insert(in.end(), ft.begin(), ft.end());
  const auto a = adjust(p, agg, ft, 0.9);
  EXPECT_EQ(a.adj, p.decoder->infer(in)[0]);
  EXPECT_EQ(a.v_star, (1.0 + a.adj) * 0.9);
  EXPECT_THROW(adjust(ModelParams::create(toy_config(Variant::rea), 1), agg, ft, 1.0), std::logic_error);
}

TEST(ModelForward, ReaSingleComparableReturnsItsValue) {
  const auto p = perturbed(toy_config(Variant::rea), 7);
  std::mt19937_64 rng(5);
  const auto set = random_set(rng, 1, 6);
  const auto pred = model_forward(p, random_vector(rng, 6), set);
  EXPECT_EQ(pred.v_star, set.entries[0].value);
  EXPECT_EQ(pred.attention, std::vector<double>{1.0});
}

TEST(ModelForward, IdenticalComparablesGiveUniformAttention) {
  const auto p = perturbed(toy_config(Variant::erea), 8);
  std::mt19937_64 rng(6);
  auto set = random_set(rng, 1, 6);
  for (int i = 0; i < 4; ++i) {
    auto e = set.entries[0];
    e.id = 10 + i;
    set.entries.push_back(e);
  }
  const auto pred = model_forward(p, random_vector(rng, 6), set);
  for (double g : pred.attention) EXPECT_NEAR(g, 0.2, 1e-15);
  EXPECT_NEAR(pred.v_star, (1.0 + pred.adj) * set.entries[0].value, 1e-14);
}

// Hand-composed chain: encode → scores → gate → softmax → aggregate → adjust.
TEST(ModelForward, EqualsCompositionOfOperations) {
  const auto p = perturbed(toy_config(Variant::erea), 9);
  std::mt19937_64 rng(7);
  const auto set = random_set(rng, 4, 6);
  const auto ft = random_vector(rng, 6);
  const auto zt = encode(p, ft);
  std::vector<std::vector<double>> zs;
  for (const auto& e : set.entries) zs.push_back(encode(p, e.features));
  const auto alpha = attention_scores(zt, zs);
  const auto beta = gated_scores(p, alpha, ft, set.entries);
  const auto gamma = softmax(beta);
  const auto agg = aggregate(gamma, set.entries);
  const auto adj = adjust(p, agg.features, ft, agg.v_hat);

  const auto pred = model_forward(p, ft, set);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(pred.alpha[i], alpha[i], 1e-12);
    EXPECT_NEAR(pred.attention[i], gamma[i], 1e-12);
  }
  EXPECT_NEAR(pred.v_hat, agg.v_hat, 1e-12);
  EXPECT_NEAR(pred.adj, adj.adj, 1e-12);
  EXPECT_NEAR(pred.v_star, adj.v_star, 1e-12);
}

TEST(ModelForward, EmptySetIsError) {
  const auto p = ModelParams::create(toy_config(Variant::rea), 1);
  EXPECT_THROW(model_forward(p, std::vector<double>(6, 0.0), ComparableSet{}), EmptyPoolError);
}

TEST(ModelForward, StructuralInvariantsProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const Variant v = trial % 2 ? Variant::erea : Variant::rea;
    const auto p = perturbed(toy_config(v), 100 + trial);
    const auto set = random_set(rng, 1 + trial % 9, 6);
    const auto pred = model_forward(p, random_vector(rng, 6), set);
    double total = 0.0;
    for (double g : pred.attention) {
      EXPECT_GE(g, 0.0);
      total += g;
    }
    EXPECT_NEAR(total, 1.0, 1e-6);
    EXPECT_EQ(pred.v_star, (1.0 + pred.adj) * pred.v_hat);
    if (v == Variant::rea) {
      EXPECT_EQ(pred.v_star, pred.v_hat);
    } else {
      EXPECT_GT(pred.v_star / pred.v_hat, 0.0);
      EXPECT_LT(pred.v_star / pred.v_hat, 2.0);
    }
  }
}

TEST(ModelForward, PermutationInvariance) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = perturbed(toy_config(Variant::erea), 200 + trial);
    const auto set = random_set(rng, 7, 6);
    const auto ft = random_vector(rng, 6);
    const auto base = model_forward(p, ft, set);
    std::vector<std::size_t> perm = {3, 0, 6, 1, 5, 2, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    ComparableSet shuffled;
    for (auto i : perm) shuffled.entries.push_back(set.entries[i]);
    const auto out = model_forward(p, ft, shuffled);
    EXPECT_EQ(out.v_hat, base.v_hat);
    EXPECT_EQ(out.v_star, base.v_star);
    EXPECT_EQ(out.aggregate, base.aggregate);
    for (std::size_t k = 0; k < perm.size(); ++k) EXPECT_EQ(out.attention[k], base.attention[perm[k]]);
  }
}

TEST(ModelForward, ReaAndEreaShareValueWithSameEncoder) {
  const auto erea = perturbed(toy_config(Variant::erea), 13);
  ModelParams rea = ModelParams::create(toy_config(Variant::rea), 0);
  rea.encoder = erea.encoder;
  std::mt19937_64 rng(1);
  auto set = random_set(rng, 1, 6);
  set.entries.push_back(set.entries[0]);
  set.entries[1].id = 2;
  const auto ft = random_vector(rng, 6);
  EXPECT_EQ(model_forward(rea, ft, set).v_hat, model_forward(erea, ft, set).v_hat);
}

TEST(LossAndGrads, PerfectPredictionIsZero) {
  const auto p = perturbed(toy_config(Variant::rea), 14);
  std::mt19937_64 rng(1);
  auto set = random_set(rng, 5, 6);
  for (auto& e : set.entries) e.value = 1.25;
  const auto ft = random_vector(rng, 6);
  const std::vector<BatchItem> batch = {{ft, &set, 1.25}};
  const auto lg = loss_and_grads(p, batch);
  // Σγ = 1 only up to rounding, so the residual is a few ulps of 1.25.
  EXPECT_LT(lg.mse, 1e-28);
  for (double g : lg.grads) EXPECT_LT(std::abs(g), 1e-13);
}

TEST(LossAndGrads, SingleComparableReaHasZeroEncoderGradient) {
  const auto p = perturbed(toy_config(Variant::rea), 15);
  std::mt19937_64 rng(1);
  const auto set = random_set(rng, 1, 6);
  const auto ft = random_vector(rng, 6);
  const std::vector<BatchItem> batch = {{ft, &set, 0.7}};
  const auto lg = loss_and_grads(p, batch);
  EXPECT_DOUBLE_EQ(lg.mse, std::pow(set.entries[0].value - 0.7, 2));
  for (double g : lg.grads) EXPECT_EQ(g, 0.0);
}

TEST(LossAndGrads, GradientCheckBothVariants) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    for (Variant v : {Variant::rea, Variant::erea}) {
      const auto p = perturbed(toy_config(v), 300 + trial);
      std::vector<ComparableSet> sets;
      std::vector<std::vector<double>> fts;
      for (int b = 0; b < 3; ++b) {
        sets.push_back(random_set(rng, 4, 6));
        fts.push_back(random_vector(rng, 6));
      }
      std::vector<BatchItem> batch;
      for (int b = 0; b < 3; ++b) batch.push_back({fts[b], &sets[b], 0.9 + 0.1 * b});
      const auto r = grad_check(loss_closure(p, batch), p.flatten(), p.param_count());
      EXPECT_LT(r.max_rel_error, 1e-4) << to_string(v) << " trial " << trial << " coord "
                                       << r.worst_index << " a=" << r.analytic << " n=" << r.numeric;
    }
  }
}

TEST(ModelConfigJson, RoundTrip) {
  auto c = toy_config(Variant::erea);
  c.gate_hidden = 5;
  const auto back = model_config_from_json(to_json(c));
  EXPECT_EQ(back.variant, c.variant);
  EXPECT_EQ(back.feature_dim, c.feature_dim);
  EXPECT_EQ(back.encoder_hidden, c.encoder_hidden);
  EXPECT_EQ(back.gate_hidden, 5u);
}

TEST(RelativeFeatures, DistanceKmAndYears) {
  PropertyRecord t{1, 0.0, 0.0, 365 * 4 + 1, 1.0, std::nullopt, {}};
  PropertyRecord c{2, 0.0, 1.0, 0, 1.0, std::nullopt, {}};
  const auto r = relative_features(t, c);
  EXPECT_NEAR(r[0], 111.19492664455873, 1e-9);
  EXPECT_DOUBLE_EQ(r[1], 4.0);
  t.date.reset();
  EXPECT_EQ(relative_features(t, c)[1], 0.0);
}

}  // namespace
}  // namespace rea
