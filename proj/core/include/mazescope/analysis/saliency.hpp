#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mazescope/analysis/actions.hpp"
#include "mazescope/nn/forward.hpp"

namespace mazescope::analysis {

struct SaliencyLogit {
  std::size_t index;
};
struct SaliencyGroup {
  EffectiveAction action;
};
using SaliencyTarget = std::variant<SaliencyLogit, SaliencyGroup>;

/// "logit:<k>" or "group:<ACTION>".
SaliencyTarget parse_saliency_target(std::string_view text);
std::string describe(const SaliencyTarget& target);

enum class SaliencyReduction { kL2, kSignedSum };
SaliencyReduction parse_reduction(std::string_view text);

struct SaliencyMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;  // height x width
  std::string target;
  SaliencyReduction reduction = SaliencyReduction::kL2;
};

/// A logit target maps to that logit; a group target maps to the summed
/// softmax probability of every output the table assigns to the action.
nn::GradientTarget to_gradient_target(const SaliencyTarget& target, const ActionTable& table);

/// Per-pixel reduction over channels of an input gradient (C x H x W).
SaliencyMap reduce_gradient(const Tensor& gradient, SaliencyReduction reduction);

SaliencyMap saliency_for(const nn::NetworkSpec& spec, const nn::WeightStore& weights,
                         const nn::ForwardContext& context, const SaliencyTarget& target,
                         const ActionTable& table = ActionTable::default_table(),
                         SaliencyReduction reduction = SaliencyReduction::kL2);

}  // namespace mazescope::analysis
