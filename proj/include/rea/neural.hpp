#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace rea {

inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;

enum class Activation { linear, selu, sigmoid, tanh };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& text);

double selu(double x);
std::vector<double> selu(std::span<const double> x);
double sigmoid(double x);
double activate(Activation act, double pre);
/// d(act)/d(pre), given both the pre-activation and the activated value.
double activation_derivative(Activation act, double pre, double post);

/// Max-subtracted softmax. Throws std::invalid_argument on empty input.
std::vector<double> softmax(std::span<const double> scores);
/// grad_scores[i] = w_i * (grad_w[i] - sum_j w_j grad_w[j]).
void softmax_backward(std::span<const double> weights, std::span<const double> grad_weights,
                      std::span<double> grad_scores);

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation act = Activation::linear;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Activations recorded by DenseStack::forward, enough to run backward.
struct ForwardCache {
  std::vector<std::vector<double>> inputs;  // input to each layer
  std::vector<std::vector<double>> pre;     // pre-activation of each layer
  std::vector<double> output;
};

/// Chain of affine layers, each followed by an activation.
///
/// Parameters live in one contiguous buffer. Layer l occupies
/// [offset(l), offset(l) + out*in + out): the out x in weight matrix in
/// row-major order, then the bias.
class DenseStack {
 public:
  DenseStack() = default;
  explicit DenseStack(std::vector<LayerShape> layers);

  /// in -> hidden... (hidden_act) -> out (out_act).
  static DenseStack mlp(std::size_t in, std::span<const std::size_t> hidden, std::size_t out,
                        Activation hidden_act, Activation out_act);

  const std::vector<LayerShape>& layers() const noexcept { return layers_; }
  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t param_count() const noexcept { return params_.size(); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  std::span<double> weight(std::size_t layer);
  std::span<const double> weight(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;
  std::size_t offset(std::size_t layer) const { return offsets_[layer]; }

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  void init_glorot(std::mt19937_64& rng);

  ForwardCache forward(std::span<const double> x) const;
  /// Forward without keeping the cache.
  std::vector<double> infer(std::span<const double> x) const;

  /// Adds parameter gradients into param_grad (param_count() long) and
  /// returns the gradient with respect to the input.
  std::vector<double> backward(const ForwardCache& cache, std::span<const double> grad_out,
                               std::span<double> param_grad) const;

 private:
  std::vector<LayerShape> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// Adam with bias correction (β1 = 0.9, β2 = 0.999, ε = 1e-8 by default).
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double base_lr = 1e-3;
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  AdamState() = default;
  AdamState(std::size_t param_count, double lr) : base_lr(lr), m(param_count), v(param_count) {}
};

/// Learning-rate multiplier applied to params[begin, end).
struct LrSegment {
  std::size_t begin = 0;
  std::size_t end = 0;
  double scale = 1.0;
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr_scale);
/// One step; each parameter's rate is base_lr times the scale of the segment
/// containing it. Segments must cover the layout without overlap.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               std::span<const LrSegment> segments);

/// Returns the objective and writes its analytic gradient into grad.
using GradientClosure = std::function<double(std::span<const double>, std::span<double>)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t probes = 0;
};

/// Compares the closure's analytic gradient with central differences on
/// probe_count randomly chosen coordinates (all of them when probe_count is
/// at least the parameter count). The relative error of one coordinate is
/// |a - n| / max(|a|, |n|, 1e-6).
GradCheckResult grad_check(const GradientClosure& closure, std::span<const double> params,
                           std::size_t probe_count, double h = 1e-5, std::uint64_t seed = 0);

}  // namespace rea
