#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mazescope/nn/network_spec.hpp"
#include "mazescope/nn/weights.hpp"
#include "mazescope/tensor.hpp"

namespace mazescope::nn {

/// Captured layer outputs for one forward pass.
struct ActivationTrace {
  std::map<std::string, Tensor> layers;
  Tensor logits;
  float value = 0.0f;
  Tensor input;
};

/// Runs the network and keeps the requested layers. Unknown names raise
/// kNotFound listing every valid layer. Single-threaded and deterministic:
/// identical inputs give bit-identical outputs within one build.
ActivationTrace forward_with_capture(const NetworkSpec& spec, const WeightStore& weights,
                                     const Tensor& input, const std::set<std::string>& capture = {});

/// Every intermediate output plus pooling switches, retained for backward_to_input.
class ForwardContext {
 public:
  const Tensor& input() const noexcept { return input_; }
  const Tensor& logits() const noexcept { return outputs_.at(policy_index_); }
  float value() const noexcept { return outputs_.at(value_index_)[0]; }
  const Tensor& output(std::size_t layer_index) const { return outputs_.at(layer_index); }

 private:
  friend ForwardContext forward_for_gradient(const NetworkSpec&, const WeightStore&, const Tensor&);
  friend class BackwardPass;

  Tensor input_;
  std::vector<Tensor> outputs_;
  std::vector<std::vector<std::uint32_t>> argmax_;
  std::size_t policy_index_ = 0;
  std::size_t value_index_ = 0;
};

ForwardContext forward_for_gradient(const NetworkSpec& spec, const WeightStore& weights,
                                    const Tensor& input);

struct LogitTarget {
  std::size_t index;
};
struct ProbabilityTarget {
  std::size_t index;
};
/// Sum of softmax probabilities over a set of output indices.
struct ProbabilityGroupTarget {
  std::vector<std::size_t> indices;
};
using GradientTarget = std::variant<LogitTarget, ProbabilityTarget, ProbabilityGroupTarget>;

/// Scalar value of the target for the given logits.
double evaluate_target(std::span<const float> logits, const GradientTarget& target);

/// d target / d input, same shape as the input. Indices outside
/// [0, num_logits) raise kRange.
Tensor backward_to_input(const NetworkSpec& spec, const WeightStore& weights,
                         const ForwardContext& context, const GradientTarget& target);

/// Logits evaluated in double precision along the same graph. Used by
/// numerical checks that need more headroom than float32 provides.
std::vector<double> logits_f64(const NetworkSpec& spec, const WeightStore& weights,
                               std::span<const double> input);

}  // namespace mazescope::nn
