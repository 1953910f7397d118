#include "rea/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rea/error.hpp"
#include "rea/geo_index.hpp"

namespace rea {

namespace {

// tanh rounds to exactly ±1 once |x| exceeds about 19, which would let v_star
// reach 0 or 2·v_hat. Keeping |adj| a hair below 1 holds the factor (1 + adj)
// strictly inside (0, 2) in floating point as well.
constexpr double kAdjLimit = 1.0 - 1e-12;

double bound_adjustment(double raw) { return std::clamp(raw, -kAdjLimit, kAdjLimit); }

}  // namespace

std::string to_string(Variant variant) { return variant == Variant::rea ? "REA" : "EREA"; }

Variant variant_from_string(std::string_view text) {
  if (text == "REA" || text == "rea") return Variant::rea;
  if (text == "EREA" || text == "erea") return Variant::erea;
  throw ValidationError("unknown model variant '" + std::string(text) + "'");
}

std::string to_string(Source source) { return source == Source::geo ? "geo" : "vector"; }

std::vector<std::string> relative_feature_names() { return {"distance_km", "time_delta_years"}; }

std::vector<double> relative_features(const PropertyRecord& target, const PropertyRecord& comp) {
  const double km = haversine(target.lat, target.lon, comp.lat, comp.lon) / 1000.0;
  double years = 0.0;
  if (target.date && comp.date) years = static_cast<double>(*target.date - *comp.date) / 365.25;
  return {km, years};
}

std::size_t ComparableSet::count(Source source) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [&](const ComparableEntry& e) { return e.source == source; }));
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const ModelConfig& c) {
  return {{"variant", to_string(c.variant)},       {"feature_dim", c.feature_dim},
          {"relative_dim", c.relative_dim},        {"embed_dim", c.embed_dim},
          {"encoder_hidden", c.encoder_hidden},    {"gate_hidden", c.gate_hidden},
          {"decoder_hidden", c.decoder_hidden}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.variant = variant_from_string(j.at("variant").get<std::string>());
  c.feature_dim = j.at("feature_dim").get<std::size_t>();
  c.relative_dim = j.value("relative_dim", c.relative_dim);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.encoder_hidden = j.value("encoder_hidden", c.encoder_hidden);
  c.gate_hidden = j.value("gate_hidden", c.gate_hidden);
  c.decoder_hidden = j.value("decoder_hidden", c.decoder_hidden);
  return c;
}

ModelParams ModelParams::create(const ModelConfig& c, std::uint64_t seed) {
  if (c.feature_dim == 0 || c.embed_dim == 0) {
    throw ValidationError("model needs a positive feature and embedding dimension");
  }
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.variant = c.variant;
  p.relative_dim = c.relative_dim;
  p.encoder = DenseStack::mlp(c.feature_dim, c.encoder_hidden, c.embed_dim, Activation::selu,
                              Activation::linear);
  p.encoder.init_glorot(rng);
  if (c.variant == Variant::erea) {
    const std::size_t gate_in = 2 * c.feature_dim + c.relative_dim + 1;
    const std::size_t gate_hidden[] = {c.gate_hidden};
    p.gate = DenseStack::mlp(gate_in, gate_hidden, 1, Activation::selu, Activation::sigmoid);
    p.gate->init_glorot(rng);
    const std::size_t dec_in = p.comparable_dim() + c.feature_dim;
    const std::size_t dec_hidden[] = {c.decoder_hidden};
    p.decoder = DenseStack::mlp(dec_in, dec_hidden, 1, Activation::selu, Activation::tanh);
    p.decoder->init_glorot(rng);
    // A zero output layer starts EREA at adj = 0, i.e. exactly at REA. With
    // Glorot weights the initial adjustment is of order one, which in the
    // normalized target space is a large multiple of the price spread.
    auto out = p.decoder->weight(p.decoder->layers().size() - 1);
    std::fill(out.begin(), out.end(), 0.0);
  }
  p.validate();
  return p;
}

std::size_t ModelParams::param_count() const {
  return encoder.param_count() + (gate ? gate->param_count() : 0) +
         (decoder ? decoder->param_count() : 0);
}

std::size_t param_count(const ModelParams& params) { return params.param_count(); }

std::vector<double> ModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  auto append = [&](const DenseStack& s) { flat.insert(flat.end(), s.params().begin(), s.params().end()); };
  append(encoder);
  if (gate) append(*gate);
  if (decoder) append(*decoder);
  return flat;
}

void ModelParams::assign(std::span<const double> flat) {
  if (flat.size() != param_count()) throw std::invalid_argument("flat parameter size mismatch");
  std::size_t pos = 0;
  auto take = [&](DenseStack& s) {
    auto dst = s.params();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), dst.size(), dst.begin());
    pos += dst.size();
  };
  take(encoder);
  if (gate) take(*gate);
  if (decoder) take(*decoder);
}

void ModelParams::validate() const {
  if (encoder.layers().empty()) throw std::invalid_argument("model has no encoder");
  if (variant == Variant::rea) {
    if (gate || decoder) throw std::invalid_argument("REA has no gate and no decoder");
    return;
  }
  if (!gate || !decoder) throw std::invalid_argument("EREA needs a gate and a decoder");
  const std::size_t f = feature_dim();
  if (gate->input_dim() != 2 * f + relative_dim + 1 || gate->output_dim() != 1 ||
      gate->layers().back().act != Activation::sigmoid) {
    throw std::invalid_argument("EREA gate must map F_t ⊕ F_i ⊕ R_i ⊕ v_i to a sigmoid scalar");
  }
  if (decoder->input_dim() != comparable_dim() + f || decoder->output_dim() != 1 ||
      decoder->layers().back().act != Activation::tanh) {
    throw std::invalid_argument("EREA decoder must map Agg_t ⊕ F_t to a tanh scalar");
  }
}

std::vector<NamedStack> ModelParams::named_stacks() const {
  std::vector<NamedStack> out{{"encoder", encoder}};
  if (gate) out.emplace_back("gate", *gate);
  if (decoder) out.emplace_back("decoder", *decoder);
  return out;
}

ModelParams ModelParams::from_named_stacks(Variant variant, std::size_t relative_dim,
                                           std::vector<NamedStack> stacks) {
  ModelParams p;
  p.variant = variant;
  p.relative_dim = relative_dim;
  bool have_encoder = false;
  for (auto& [name, stack] : stacks) {
    if (name == "encoder") {
      p.encoder = std::move(stack);
      have_encoder = true;
    } else if (name == "gate") {
      p.gate = std::move(stack);
    } else if (name == "decoder") {
      p.decoder = std::move(stack);
    } else {
      throw ValidationError("unexpected parameter stack '" + name + "'");
    }
  }
  if (!have_encoder) throw ValidationError("parameter file has no encoder");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return p;
}

// ---------------------------------------------------------------------------

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void require_erea(const ModelParams& params, const char* op) {
  if (params.variant != Variant::erea || !params.gate || !params.decoder) {
    throw std::logic_error(std::string(op) + " is only defined for EREA");
  }
}

std::vector<double> comparable_vector(const ComparableEntry& e) {
  std::vector<double> c(e.features);
  c.insert(c.end(), e.relative.begin(), e.relative.end());
  c.push_back(e.value);
  return c;
}

std::vector<std::size_t> id_order(const ComparableSet& set) {
  std::vector<std::size_t> order(set.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return set.entries[a].id < set.entries[b].id;
  });
  return order;
}

// Everything backward needs. Per-comparable vectors are indexed in
// ascending-id order (position k refers to entries[order[k]]).
struct Trace {
  std::vector<std::size_t> order;
  ForwardCache target_cache;
  std::vector<ForwardCache> comp_caches;
  std::vector<ForwardCache> gate_caches;
  std::optional<ForwardCache> decoder_cache;
  std::vector<std::vector<double>> comp_vectors;  // F_i ⊕ R_i ⊕ v_i
  std::vector<double> alpha, gate, beta, gamma;
  double v_hat = 0.0;
  double adj = 0.0;
  bool adj_clamped = false;
  double v_star = 0.0;
  std::vector<double> agg;
};

Trace trace_forward(const ModelParams& params, std::span<const double> target_features,
                    const ComparableSet& set) {
  if (set.entries.empty()) {
    throw EmptyPoolError("no comparables for target " + std::to_string(set.target_id));
  }
  const bool erea = params.variant == Variant::erea;
  Trace t;
  t.order = id_order(set);
  const std::size_t m = t.order.size();
  t.target_cache = params.encoder.forward(target_features);
  const auto& zt = t.target_cache.output;

  t.comp_caches.reserve(m);
  t.alpha.resize(m);
  t.gate.assign(m, 1.0);
  t.beta.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& e = set.entries[t.order[k]];
    t.comp_caches.push_back(params.encoder.forward(e.features));
    t.alpha[k] = dot(t.comp_caches[k].output, zt);
    t.comp_vectors.push_back(comparable_vector(e));
    if (erea) {
      t.gate_caches.push_back(params.gate->forward(gate_input(target_features, e)));
      t.gate[k] = t.gate_caches[k].output[0];
      t.beta[k] = t.alpha[k] * t.gate[k];
    } else {
      t.beta[k] = t.alpha[k];
    }
  }
  t.gamma = softmax(t.beta);

  t.agg.assign(params.comparable_dim(), 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    t.v_hat += t.gamma[k] * t.comp_vectors[k].back();
    for (std::size_t j = 0; j < t.agg.size(); ++j) t.agg[j] += t.gamma[k] * t.comp_vectors[k][j];
  }
  if (erea) {
    std::vector<double> dec_in(t.agg);
    dec_in.insert(dec_in.end(), target_features.begin(), target_features.end());
    t.decoder_cache = params.decoder->forward(dec_in);
    t.adj = bound_adjustment(t.decoder_cache->output[0]);
    t.adj_clamped = t.adj != t.decoder_cache->output[0];
  }
  t.v_star = (1.0 + t.adj) * t.v_hat;
  return t;
}

// Adds d(v_star)/dθ * grad_v_star into grads.
void trace_backward(const ModelParams& params, const Trace& t, double grad_v_star,
                    std::span<double> grads) {
  const bool erea = params.variant == Variant::erea;
  const std::size_t m = t.order.size();
  auto enc_grad = grads.subspan(0, params.encoder_end());

  double grad_v_hat = grad_v_star;
  std::vector<double> grad_agg;
  if (erea) {
    grad_v_hat = grad_v_star * (1.0 + t.adj);
    const double grad_adj = t.adj_clamped ? 0.0 : grad_v_star * t.v_hat;
    auto dec_grad = grads.subspan(params.gate_end(), params.decoder->param_count());
    const double g[] = {grad_adj};
    auto grad_in = params.decoder->backward(*t.decoder_cache, g, dec_grad);
    grad_agg.assign(grad_in.begin(), grad_in.begin() + static_cast<std::ptrdiff_t>(t.agg.size()));
  }

  std::vector<double> grad_gamma(m);
  for (std::size_t k = 0; k < m; ++k) {
    grad_gamma[k] = grad_v_hat * t.comp_vectors[k].back();
    if (erea) grad_gamma[k] += dot(grad_agg, t.comp_vectors[k]);
  }
  std::vector<double> grad_beta(m);
  softmax_backward(t.gamma, grad_gamma, grad_beta);

  std::vector<double> grad_alpha(m);
  if (erea) {
    auto gate_grad = grads.subspan(params.encoder_end(), params.gate->param_count());
    for (std::size_t k = 0; k < m; ++k) {
      grad_alpha[k] = grad_beta[k] * t.gate[k];
      const double g[] = {grad_beta[k] * t.alpha[k]};
      params.gate->backward(t.gate_caches[k], g, gate_grad);
    }
  } else {
    grad_alpha = grad_beta;
  }

  const auto& zt = t.target_cache.output;
  std::vector<double> grad_zt(zt.size(), 0.0);
  std::vector<double> grad_zi(zt.size());
  for (std::size_t k = 0; k < m; ++k) {
    const auto& zi = t.comp_caches[k].output;
    for (std::size_t d = 0; d < zt.size(); ++d) {
      grad_zt[d] += grad_alpha[k] * zi[d];
      grad_zi[d] = grad_alpha[k] * zt[d];
    }
    params.encoder.backward(t.comp_caches[k], grad_zi, enc_grad);
  }
  params.encoder.backward(t.target_cache, grad_zt, enc_grad);
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> encode(const ModelParams& params, std::span<const double> features) {
  return params.encoder.infer(features);
}

std::vector<double> attention_scores(std::span<const double> target_embedding,
                                     const std::vector<std::vector<double>>& comparable_embeddings) {
  std::vector<double> alpha;
  alpha.reserve(comparable_embeddings.size());
  for (const auto& z : comparable_embeddings) {
    if (z.size() != target_embedding.size()) {
      throw std::invalid_argument("attention_scores: embedding dimensions differ");
    }
    alpha.push_back(dot(z, target_embedding));
  }
  return alpha;
}

std::vector<double> gate_input(std::span<const double> target_features, const ComparableEntry& e) {
  std::vector<double> in(target_features.begin(), target_features.end());
  in.insert(in.end(), e.features.begin(), e.features.end());
  in.insert(in.end(), e.relative.begin(), e.relative.end());
  in.push_back(e.value);
  return in;
}

std::vector<double> gated_scores(const ModelParams& params, std::span<const double> alpha,
                                 std::span<const double> target_features,
                                 const std::vector<ComparableEntry>& entries) {
  require_erea(params, "gated_scores");
  if (alpha.size() != entries.size()) throw std::invalid_argument("gated_scores: size mismatch");
  std::vector<double> beta(alpha.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    beta[i] = alpha[i] * params.gate->infer(gate_input(target_features, entries[i]))[0];
  }
  return beta;
}

Aggregate aggregate(std::span<const double> weights, const std::vector<ComparableEntry>& entries) {
  if (entries.empty()) throw EmptyPoolError("aggregate over an empty comparable set");
  if (weights.size() != entries.size()) throw std::invalid_argument("aggregate: size mismatch");
  Aggregate out;
  out.features.assign(entries.front().features.size() + entries.front().relative.size() + 1, 0.0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto c = comparable_vector(entries[i]);
    if (c.size() != out.features.size()) throw std::invalid_argument("aggregate: ragged entries");
    out.v_hat += weights[i] * entries[i].value;
    for (std::size_t j = 0; j < c.size(); ++j) out.features[j] += weights[i] * c[j];
  }
  return out;
}

Adjustment adjust(const ModelParams& params, std::span<const double> aggregate_features,
                  std::span<const double> target_features, double v_hat) {
  require_erea(params, "adjust");
  std::vector<double> in(aggregate_features.begin(), aggregate_features.end());
  in.insert(in.end(), target_features.begin(), target_features.end());
  Adjustment a;
  a.adj = bound_adjustment(params.decoder->infer(in)[0]);
  a.v_star = (1.0 + a.adj) * v_hat;
  return a;
}

Prediction model_forward(const ModelParams& params, std::span<const double> target_features,
                         const ComparableSet& comparables) {
  const Trace t = trace_forward(params, target_features, comparables);
  Prediction p;
  p.v_hat = t.v_hat;
  p.adj = t.adj;
  p.v_star = t.v_star;
  p.aggregate = t.agg;
  const std::size_t m = t.order.size();
  p.alpha.resize(m);
  p.beta.resize(m);
  p.gate.resize(m);
  p.attention.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = t.order[k];
    p.alpha[i] = t.alpha[k];
    p.beta[i] = t.beta[k];
    p.gate[i] = t.gate[k];
    p.attention[i] = t.gamma[k];
  }
  return p;
}

double accumulate_example_grads(const ModelParams& params, const BatchItem& item, double weight,
                                std::span<double> grads) {
  if (grads.size() != params.param_count()) {
    throw std::invalid_argument("gradient buffer does not match parameter layout");
  }
  const Trace t = trace_forward(params, item.target_features, *item.comparables);
  const double err = t.v_star - item.target_value;
  trace_backward(params, t, 2.0 * err * weight, grads);
  return err * err;
}

LossAndGrads loss_and_grads(const ModelParams& params, std::span<const BatchItem> batch) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grads on an empty batch");
  LossAndGrads out;
  out.grads.assign(params.param_count(), 0.0);
  const double weight = 1.0 / static_cast<double>(batch.size());
  double sse = 0.0;
  for (const auto& item : batch) sse += accumulate_example_grads(params, item, weight, out.grads);
  out.mse = sse * weight;
  return out;
}

}  // namespace rea
