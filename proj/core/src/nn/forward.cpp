#include "mazescope/nn/forward.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <type_traits>

#include "kernels.hpp"
#include "mazescope/error.hpp"
#include "mazescope/nn/layers.hpp"

namespace mazescope::nn {

namespace {

template <class T>
struct Tape {
  std::vector<std::vector<T>> outputs;
  std::vector<std::vector<std::uint32_t>> argmax;
};

/// Parameter pointers in the evaluation scalar type. float reads the store
/// directly; double converts once per run.
template <class T>
class ParamSource {
 public:
  explicit ParamSource(const WeightStore& store) : store_(store) {}

  std::pair<const T*, const T*> get(const LayerDesc& layer) {
    const auto& p = store_.at(layer.name);
    if constexpr (std::is_same_v<T, float>) {
      return {p.kernel.data().data(), p.bias.data().data()};
    } else {
      auto& k = converted_.emplace_back(p.kernel.data().begin(), p.kernel.data().end());
      auto& b = converted_.emplace_back(p.bias.data().begin(), p.bias.data().end());
      return {k.data(), b.data()};
    }
  }

 private:
  const WeightStore& store_;
  std::deque<std::vector<T>> converted_;
};

void check_input(const NetworkSpec& spec, const Shape& shape) {
  if (shape != spec.input_shape()) {
    throw Error(ErrorCode::kConfiguration, "network input must be " + shape_to_string(spec.input_shape()) +
                                               ", got " + shape_to_string(shape));
  }
}

template <class T>
Tape<T> run_graph(const NetworkSpec& spec, const WeightStore& weights, std::span<const T> input) {
  const auto& layers = spec.layers();
  Tape<T> tape;
  tape.outputs.resize(layers.size());
  tape.argmax.resize(layers.size());
  ParamSource<T> params(weights);
  const Shape input_shape = spec.input_shape();

  auto source = [&](int index) -> const std::vector<T>* {
    return index == kNetworkInput ? nullptr : &tape.outputs[static_cast<std::size_t>(index)];
  };
  auto data_of = [&](int index) -> const T* {
    const auto* v = source(index);
    return v ? v->data() : input.data();
  };
  auto shape_of = [&](int index) -> const Shape& {
    return index == kNetworkInput ? input_shape : layers[static_cast<std::size_t>(index)].output_shape;
  };

  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    auto& out = tape.outputs[i];
    out.resize(shape_numel(layer.output_shape));
    const T* in = data_of(layer.inputs[0]);
    const Shape& in_shape = shape_of(layer.inputs[0]);
    switch (layer.kind) {
      case LayerKind::kConv: {
        auto [k, b] = params.get(layer);
        kernels::conv3x3(in, in_shape[0], in_shape[1], in_shape[2], k, b, layer.output_shape[0], out.data());
        break;
      }
      case LayerKind::kMaxPool:
        tape.argmax[i].resize(out.size());
        kernels::maxpool3x3s2(in, in_shape[0], in_shape[1], in_shape[2], out.data(), tape.argmax[i].data());
        break;
      case LayerKind::kRelu:
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(in[j], T(0));
        break;
      case LayerKind::kResAdd: {
        const T* skip = data_of(layer.inputs[1]);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = in[j] + skip[j];
        break;
      }
      case LayerKind::kFlatten:
        std::copy(in, in + out.size(), out.begin());
        break;
      case LayerKind::kDense: {
        auto [k, b] = params.get(layer);
        kernels::dense(in, layer.kernel_shape[1], k, b, layer.kernel_shape[0], out.data());
        break;
      }
    }
  }
  return tape;
}

std::vector<bool> target_mask(const GradientTarget& target, std::size_t num_logits) {
  std::vector<bool> mask(num_logits, false);
  auto mark = [&](std::size_t index) {
    if (index >= num_logits) {
      throw Error(ErrorCode::kRange, "target index " + std::to_string(index) + " outside [0, " +
                                         std::to_string(num_logits) + ")");
    }
    mask[index] = true;
  };
  std::visit(
      [&](const auto& t) {
        using V = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<V, ProbabilityGroupTarget>) {
          for (auto idx : t.indices) mark(idx);
        } else {
          mark(t.index);
        }
      },
      target);
  return mask;
}

/// d target / d logits.
std::vector<float> target_gradient(std::span<const float> logits, const GradientTarget& target) {
  const auto mask = target_mask(target, logits.size());
  std::vector<float> grad(logits.size(), 0.0f);
  if (std::holds_alternative<LogitTarget>(target)) {
    grad[std::get<LogitTarget>(target).index] = 1.0f;
    return grad;
  }
  const auto probs = softmax(logits);
  double group = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (mask[j]) group += probs[j];
  }
  for (std::size_t j = 0; j < probs.size(); ++j) {
    grad[j] = static_cast<float>(probs[j] * ((mask[j] ? 1.0 : 0.0) - group));
  }
  return grad;
}

}  // namespace

ActivationTrace forward_with_capture(const NetworkSpec& spec, const WeightStore& weights, const Tensor& input,
                                     const std::set<std::string>& capture) {
  std::vector<std::size_t> wanted;
  for (const auto& name : capture) wanted.push_back(spec.index_of(name));
  check_input(spec, input.shape());
  validate_weights(weights, spec);

  auto tape = run_graph<float>(spec, weights, input.data());
  ActivationTrace trace;
  trace.logits = Tensor(spec.layer(spec.policy_index()).output_shape, tape.outputs[spec.policy_index()]);
  trace.value = tape.outputs[spec.value_index()][0];
  for (auto idx : wanted) {
    const auto& layer = spec.layer(idx);
    trace.layers.emplace(layer.name, Tensor(layer.output_shape, std::move(tape.outputs[idx])));
  }
  trace.input = input;
  return trace;
}

ForwardContext forward_for_gradient(const NetworkSpec& spec, const WeightStore& weights, const Tensor& input) {
  check_input(spec, input.shape());
  validate_weights(weights, spec);
  auto tape = run_graph<float>(spec, weights, input.data());
  ForwardContext ctx;
  ctx.input_ = input;
  ctx.outputs_.reserve(tape.outputs.size());
  for (std::size_t i = 0; i < tape.outputs.size(); ++i) {
    ctx.outputs_.emplace_back(spec.layer(i).output_shape, std::move(tape.outputs[i]));
  }
  ctx.argmax_ = std::move(tape.argmax);
  ctx.policy_index_ = spec.policy_index();
  ctx.value_index_ = spec.value_index();
  return ctx;
}

class BackwardPass {
 public:
  static Tensor run(const NetworkSpec& spec, const WeightStore& weights, const ForwardContext& ctx,
                    const GradientTarget& target) {
    const auto& layers = spec.layers();
    if (ctx.outputs_.size() != layers.size()) {
      throw Error(ErrorCode::kConfiguration, "forward context was produced for a different network");
    }
    std::vector<std::vector<float>> grads(layers.size());
    Tensor grad_input(ctx.input_.shape());

    auto grad_of = [&](int index) -> float* {
      if (index == kNetworkInput) return grad_input.data().data();
      auto& g = grads[static_cast<std::size_t>(index)];
      if (g.empty()) g.assign(shape_numel(layers[static_cast<std::size_t>(index)].output_shape), 0.0f);
      return g.data();
    };

    grads[ctx.policy_index_] = target_gradient(ctx.logits().data(), target);

    for (std::size_t i = layers.size(); i-- > 0;) {
      const auto& g = grads[i];
      if (g.empty()) continue;
      const auto& layer = layers[i];
      const int src = layer.inputs[0];
      float* gin = grad_of(src);
      switch (layer.kind) {
        case LayerKind::kConv: {
          const auto& p = weights.at(layer.name);
          kernels::conv3x3_backward_input(g.data(), layer.output_shape[0], layer.output_shape[1],
                                          layer.output_shape[2], p.kernel.data().data(), layer.kernel_shape[1],
                                          gin);
          break;
        }
        case LayerKind::kMaxPool: {
          const auto& sw = ctx.argmax_[i];
          for (std::size_t j = 0; j < g.size(); ++j) gin[sw[j]] += g[j];
          break;
        }
        case LayerKind::kRelu: {
          const auto out = ctx.outputs_[i].data();
          for (std::size_t j = 0; j < g.size(); ++j) {
            if (out[j] > 0.0f) gin[j] += g[j];
          }
          break;
        }
        case LayerKind::kResAdd: {
          for (std::size_t j = 0; j < g.size(); ++j) gin[j] += g[j];
          float* gskip = grad_of(layer.inputs[1]);
          for (std::size_t j = 0; j < g.size(); ++j) gskip[j] += g[j];
          break;
        }
        case LayerKind::kFlatten:
          for (std::size_t j = 0; j < g.size(); ++j) gin[j] += g[j];
          break;
        case LayerKind::kDense: {
          const auto& p = weights.at(layer.name);
          kernels::dense_backward_input(g.data(), layer.kernel_shape[0], p.kernel.data().data(),
                                        layer.kernel_shape[1], gin);
          break;
        }
      }
      grads[i].clear();
      grads[i].shrink_to_fit();
    }
    return grad_input;
  }
};

double evaluate_target(std::span<const float> logits, const GradientTarget& target) {
  const auto mask = target_mask(target, logits.size());
  if (std::holds_alternative<LogitTarget>(target)) return logits[std::get<LogitTarget>(target).index];
  const auto probs = softmax(logits);
  double total = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (mask[j]) total += probs[j];
  }
  return total;
}

Tensor backward_to_input(const NetworkSpec& spec, const WeightStore& weights, const ForwardContext& context,
                         const GradientTarget& target) {
  validate_weights(weights, spec);
  return BackwardPass::run(spec, weights, context, target);
}

std::vector<double> logits_f64(const NetworkSpec& spec, const WeightStore& weights, std::span<const double> input) {
  if (input.size() != shape_numel(spec.input_shape())) {
    throw Error(ErrorCode::kConfiguration, "network input must have " +
                                               std::to_string(shape_numel(spec.input_shape())) + " values");
  }
  validate_weights(weights, spec);
  auto tape = run_graph<double>(spec, weights, input);
  return std::move(tape.outputs[spec.policy_index()]);
}

}  // namespace mazescope::nn
