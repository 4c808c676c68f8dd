#include "mazescope/analysis/saliency.hpp"

#include <charconv>
#include <cmath>

#include "mazescope/error.hpp"

namespace mazescope::analysis {

SaliencyTarget parse_saliency_target(std::string_view text) {
  if (text.starts_with("logit:")) {
    const auto digits = text.substr(6);
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
      throw Error(ErrorCode::kParameter, "bad saliency target '" + std::string(text) + "'");
    }
    if (index >= kNumPolicyOutputs) {
      throw Error(ErrorCode::kRange, "logit index " + std::to_string(index) + " outside [0, 15)");
    }
    return SaliencyLogit{index};
  }
  if (text.starts_with("group:")) return SaliencyGroup{parse_action(text.substr(6))};
  throw Error(ErrorCode::kParameter, "saliency target must be logit:<k> or group:<ACTION>, got '" +
                                         std::string(text) + "'");
}

std::string describe(const SaliencyTarget& target) {
  if (const auto* logit = std::get_if<SaliencyLogit>(&target)) return "logit:" + std::to_string(logit->index);
  return "group:" + std::string(action_name(std::get<SaliencyGroup>(target).action));
}

SaliencyReduction parse_reduction(std::string_view text) {
  if (text == "l2") return SaliencyReduction::kL2;
  if (text == "sum") return SaliencyReduction::kSignedSum;
  throw Error(ErrorCode::kParameter, "reduction must be l2 or sum, got '" + std::string(text) + "'");
}

nn::GradientTarget to_gradient_target(const SaliencyTarget& target, const ActionTable& table) {
  if (const auto* logit = std::get_if<SaliencyLogit>(&target)) {
    if (logit->index >= kNumPolicyOutputs) {
      throw Error(ErrorCode::kRange, "logit index " + std::to_string(logit->index) + " outside [0, 15)");
    }
    return nn::LogitTarget{logit->index};
  }
  return nn::ProbabilityGroupTarget{table.outputs_for(std::get<SaliencyGroup>(target).action)};
}

SaliencyMap reduce_gradient(const Tensor& gradient, SaliencyReduction reduction) {
  if (gradient.rank() != 3) throw Error(ErrorCode::kConfiguration, "gradient must be C x H x W");
  SaliencyMap map;
  map.height = gradient.dim(1);
  map.width = gradient.dim(2);
  map.reduction = reduction;
  map.values.assign(map.height * map.width, 0.0f);
  for (std::size_t y = 0; y < map.height; ++y) {
    for (std::size_t x = 0; x < map.width; ++x) {
      double acc = 0.0;
      for (std::size_t c = 0; c < gradient.dim(0); ++c) {
        const double g = gradient.at(c, y, x);
        acc += reduction == SaliencyReduction::kL2 ? g * g : g;
      }
      map.values[y * map.width + x] =
          static_cast<float>(reduction == SaliencyReduction::kL2 ? std::sqrt(acc) : acc);
    }
  }
  return map;
}

SaliencyMap saliency_for(const nn::NetworkSpec& spec, const nn::WeightStore& weights,
                         const nn::ForwardContext& context, const SaliencyTarget& target, const ActionTable& table,
                         SaliencyReduction reduction) {
  const auto grad = nn::backward_to_input(spec, weights, context, to_gradient_target(target, table));
  SaliencyMap map = reduce_gradient(grad, reduction);
  map.target = describe(target);
  return map;
}

}  // namespace mazescope::analysis
