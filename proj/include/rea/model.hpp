#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rea/data.hpp"
#include "rea/neural.hpp"
#include "rea/param_io.hpp"

namespace rea {

/// REA: encoder + dot-product attention + weighted value average.
/// EREA: REA plus an attention gate and a tanh-bounded adjustment decoder.
enum class Variant { rea, erea };

std::string to_string(Variant variant);
Variant variant_from_string(std::string_view text);

enum class Source { geo, vector };

std::string to_string(Source source);

/// Relative features of a comparable towards its target:
/// [haversine distance in km, target date - comparable date in years].
inline constexpr std::size_t kRelativeDim = 2;
std::vector<std::string> relative_feature_names();
std::vector<double> relative_features(const PropertyRecord& target, const PropertyRecord& comparable);

struct ComparableEntry {
  RecordId id = 0;
  Source source = Source::geo;
  std::vector<double> features;  // scaled F_i
  std::vector<double> relative;  // R_i
  double value = 0.0;            // v_i in target space
};

struct ComparableSet {
  RecordId target_id = 0;
  std::vector<ComparableEntry> entries;

  std::size_t count(Source source) const;
};

struct ModelConfig {
  Variant variant = Variant::rea;
  std::size_t feature_dim = 0;
  std::size_t relative_dim = kRelativeDim;
  std::size_t embed_dim = 16;
  std::vector<std::size_t> encoder_hidden = {16};
  std::size_t gate_hidden = 8;
  std::size_t decoder_hidden = 16;
};

nlohmann::json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

/// Learnable state. The encoder is shared by targets and comparables; the
/// gate and decoder exist only for EREA.
///
/// Flat layout used by the optimizer: encoder | gate | decoder.
struct ModelParams {
  Variant variant = Variant::rea;
  std::size_t relative_dim = kRelativeDim;
  DenseStack encoder;
  std::optional<DenseStack> gate;
  std::optional<DenseStack> decoder;

  /// Builds the stacks for config and initializes them from seed.
  static ModelParams create(const ModelConfig& config, std::uint64_t seed);

  std::size_t feature_dim() const { return encoder.input_dim(); }
  std::size_t embed_dim() const { return encoder.output_dim(); }
  /// Width of F_i ⊕ R_i ⊕ v_i.
  std::size_t comparable_dim() const { return feature_dim() + relative_dim + 1; }

  std::size_t param_count() const;
  std::size_t encoder_end() const { return encoder.param_count(); }
  std::size_t gate_end() const { return encoder_end() + (gate ? gate->param_count() : 0); }

  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  /// Throws std::invalid_argument when shapes disagree with the variant.
  void validate() const;

  std::vector<NamedStack> named_stacks() const;
  static ModelParams from_named_stacks(Variant variant, std::size_t relative_dim,
                                       std::vector<NamedStack> stacks);
};

std::size_t param_count(const ModelParams& params);

struct Prediction {
  double v_hat = 0.0;
  double adj = 0.0;
  double v_star = 0.0;
  // Per comparable, in the order of the input set.
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> gate;  // 1 for REA
  std::vector<double> attention;
  std::vector<double> aggregate;  // Agg_t
};

std::vector<double> encode(const ModelParams& params, std::span<const double> features);

std::vector<double> attention_scores(std::span<const double> target_embedding,
                                     const std::vector<std::vector<double>>& comparable_embeddings);

/// F_t ⊕ F_i ⊕ R_i ⊕ v_i.
std::vector<double> gate_input(std::span<const double> target_features, const ComparableEntry& entry);

/// β_i = α_i · gate(F_t ⊕ F_i ⊕ R_i ⊕ v_i). EREA only.
std::vector<double> gated_scores(const ModelParams& params, std::span<const double> alpha,
                                 std::span<const double> target_features,
                                 const std::vector<ComparableEntry>& entries);

struct Aggregate {
  double v_hat = 0.0;
  std::vector<double> features;  // Agg_t
};

/// Weighted value and weighted F_i ⊕ R_i ⊕ v_i, summed in the given order.
Aggregate aggregate(std::span<const double> weights, const std::vector<ComparableEntry>& entries);

struct Adjustment {
  double adj = 0.0;
  double v_star = 0.0;
};

/// adj = tanh(Decoder(Agg_t ⊕ F_t)), v_star = (1 + adj) · v_hat. EREA only.
Adjustment adjust(const ModelParams& params, std::span<const double> aggregate_features,
                  std::span<const double> target_features, double v_hat);

/// Full forward pass. Reductions run in ascending comparable id order so the
/// result does not depend on the order of the input set.
Prediction model_forward(const ModelParams& params, std::span<const double> target_features,
                         const ComparableSet& comparables);

struct BatchItem {
  std::span<const double> target_features;
  const ComparableSet* comparables = nullptr;
  double target_value = 0.0;
};

struct LossAndGrads {
  double mse = 0.0;
  std::vector<double> grads;  // flat layout of ModelParams
};

/// Adds weight * d(v_star - v_t)^2 / dθ into grads and returns the squared error.
double accumulate_example_grads(const ModelParams& params, const BatchItem& item, double weight,
                                std::span<double> grads);

/// Mean squared error over the batch and its gradient.
LossAndGrads loss_and_grads(const ModelParams& params, std::span<const BatchItem> batch);

}  // namespace rea
