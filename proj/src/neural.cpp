#include "rea/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rea {

std::string to_string(Activation act) {
  switch (act) {
    case Activation::linear: return "linear";
    case Activation::selu: return "selu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "linear";
}

Activation activation_from_string(const std::string& text) {
  if (text == "linear") return Activation::linear;
  if (text == "selu") return Activation::selu;
  if (text == "sigmoid") return Activation::sigmoid;
  if (text == "tanh") return Activation::tanh;
  throw std::invalid_argument("unknown activation '" + text + "'");
}

double selu(double x) {
  return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x);
}

std::vector<double> selu(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](double v) { return selu(v); });
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double activate(Activation act, double pre) {
  switch (act) {
    case Activation::linear: return pre;
    case Activation::selu: return selu(pre);
    case Activation::sigmoid: return sigmoid(pre);
    case Activation::tanh: return std::tanh(pre);
  }
  return pre;
}

double activation_derivative(Activation act, double pre, double post) {
  switch (act) {
    case Activation::linear: return 1.0;
    case Activation::selu: return pre > 0.0 ? kSeluLambda : post + kSeluLambda * kSeluAlpha;
    case Activation::sigmoid: return post * (1.0 - post);
    case Activation::tanh: return 1.0 - post * post;
  }
  return 1.0;
}

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("softmax of an empty vector");
  const double peak = *std::max_element(scores.begin(), scores.end());
  std::vector<double> w(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp(scores[i] - peak);
    total += w[i];
  }
  for (auto& x : w) x /= total;
  return w;
}

void softmax_backward(std::span<const double> weights, std::span<const double> grad_weights,
                      std::span<double> grad_scores) {
  double dot = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) dot += weights[i] * grad_weights[i];
  for (std::size_t i = 0; i < weights.size(); ++i) {
    grad_scores[i] = weights[i] * (grad_weights[i] - dot);
  }
}

// ---------------------------------------------------------------------------

DenseStack::DenseStack(std::vector<LayerShape> layers) : layers_(std::move(layers)) {
  std::size_t total = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& s = layers_[l];
    if (s.in == 0 || s.out == 0) throw std::invalid_argument("dense layer with zero width");
    if (l > 0 && layers_[l - 1].out != s.in) {
      throw std::invalid_argument("dense stack layer dimensions do not chain");
    }
    offsets_.push_back(total);
    total += s.in * s.out + s.out;
  }
  params_.assign(total, 0.0);
}

DenseStack DenseStack::mlp(std::size_t in, std::span<const std::size_t> hidden, std::size_t out,
                           Activation hidden_act, Activation out_act) {
  std::vector<LayerShape> layers;
  std::size_t prev = in;
  for (auto width : hidden) {
    layers.push_back({prev, width, hidden_act});
    prev = width;
  }
  layers.push_back({prev, out, out_act});
  return DenseStack(std::move(layers));
}

std::size_t DenseStack::input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
std::size_t DenseStack::output_dim() const { return layers_.empty() ? 0 : layers_.back().out; }

std::span<double> DenseStack::weight(std::size_t l) {
  return {params_.data() + offsets_[l], layers_[l].in * layers_[l].out};
}
std::span<const double> DenseStack::weight(std::size_t l) const {
  return {params_.data() + offsets_[l], layers_[l].in * layers_[l].out};
}
std::span<double> DenseStack::bias(std::size_t l) {
  return {params_.data() + offsets_[l] + layers_[l].in * layers_[l].out, layers_[l].out};
}
std::span<const double> DenseStack::bias(std::size_t l) const {
  return {params_.data() + offsets_[l] + layers_[l].in * layers_[l].out, layers_[l].out};
}

void DenseStack::init_glorot(std::mt19937_64& rng) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layers_[l].in + layers_[l].out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& w : weight(l)) w = dist(rng);
    for (auto& b : bias(l)) b = 0.0;
  }
}

ForwardCache DenseStack::forward(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw std::invalid_argument("dense stack input has " + std::to_string(x.size()) +
                                " entries, expected " + std::to_string(input_dim()));
  }
  ForwardCache cache;
  cache.inputs.reserve(layers_.size());
  cache.pre.reserve(layers_.size());
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& s = layers_[l];
    const auto w = weight(l);
    const auto b = bias(l);
    std::vector<double> pre(s.out);
    for (std::size_t o = 0; o < s.out; ++o) {
      double acc = b[o];
      const double* row = w.data() + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) acc += row[i] * cur[i];
      pre[o] = acc;
    }
    std::vector<double> post(s.out);
    for (std::size_t o = 0; o < s.out; ++o) post[o] = activate(s.act, pre[o]);
    cache.inputs.push_back(std::move(cur));
    cache.pre.push_back(std::move(pre));
    cur = std::move(post);
  }
  cache.output = std::move(cur);
  return cache;
}

std::vector<double> DenseStack::infer(std::span<const double> x) const {
  return forward(x).output;
}

std::vector<double> DenseStack::backward(const ForwardCache& cache, std::span<const double> grad_out,
                                         std::span<double> param_grad) const {
  if (cache.inputs.size() != layers_.size() || grad_out.size() != output_dim() ||
      param_grad.size() != params_.size()) {
    throw std::invalid_argument("dense stack backward: cache or gradient does not match layout");
  }
  std::vector<double> grad(grad_out.begin(), grad_out.end());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& s = layers_[l];
    const auto& in = cache.inputs[l];
    const auto& pre = cache.pre[l];
    if (in.size() != s.in || pre.size() != s.out) {
      throw std::invalid_argument("dense stack backward: stale cache");
    }
    const std::vector<double>& post = l + 1 < layers_.size() ? cache.inputs[l + 1] : cache.output;
    std::vector<double> delta(s.out);
    for (std::size_t o = 0; o < s.out; ++o) {
      delta[o] = grad[o] * activation_derivative(s.act, pre[o], post[o]);
    }
    const auto w = weight(l);
    double* gw = param_grad.data() + offsets_[l];
    double* gb = gw + s.in * s.out;
    std::vector<double> grad_in(s.in, 0.0);
    for (std::size_t o = 0; o < s.out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      const double* row = w.data() + o * s.in;
      double* grow = gw + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) {
        grow[i] += d * in[i];
        grad_in[i] += d * row[i];
      }
    }
    grad = std::move(grad_in);
  }
  return grad;
}

// ---------------------------------------------------------------------------

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr_scale) {
  const LrSegment all{0, params.size(), lr_scale};
  adam_step(params, grads, state, std::span<const LrSegment>(&all, 1));
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               std::span<const LrSegment> segments) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: parameter, gradient and moment layouts differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double corr1 = 1.0 - std::pow(state.beta1, t);
  const double corr2 = 1.0 - std::pow(state.beta2, t);
  std::size_t covered = 0;
  for (const auto& seg : segments) {
    if (seg.begin != covered || seg.end < seg.begin || seg.end > params.size()) {
      throw std::invalid_argument("adam_step: learning-rate segments do not tile the layout");
    }
    const double lr = state.base_lr * seg.scale;
    for (std::size_t i = seg.begin; i < seg.end; ++i) {
      const double g = grads[i];
      state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
      state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = state.m[i] / corr1;
      const double v_hat = state.v[i] / corr2;
      params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
    covered = seg.end;
  }
  if (covered != params.size()) {
    throw std::invalid_argument("adam_step: learning-rate segments do not tile the layout");
  }
}

// ---------------------------------------------------------------------------

GradCheckResult grad_check(const GradientClosure& closure, std::span<const double> params,
                           std::size_t probe_count, double h, std::uint64_t seed) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grad_check: step h must be > 0");
  const std::size_t n = params.size();
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> analytic(n, 0.0);
  closure(p, analytic);

  std::vector<std::size_t> coords(n);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (probe_count < n) {
    std::mt19937_64 rng(seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(probe_count);
  }

  GradCheckResult result;
  std::vector<double> scratch(n);
  for (auto i : coords) {
    const double saved = p[i];
    p[i] = saved + h;
    const double plus = closure(p, scratch);
    p[i] = saved - h;
    const double minus = closure(p, scratch);
    p[i] = saved;
    const double numeric = (plus - minus) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > result.max_rel_error || result.probes == 0) {
      result.max_rel_error = rel;
      result.worst_index = i;
      result.analytic = analytic[i];
      result.numeric = numeric;
    }
    ++result.probes;
  }
  return result;
}

}  // namespace rea
