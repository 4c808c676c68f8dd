#include "mazescope/analysis/actions.hpp"

#include <algorithm>
#include <cctype>

#include "mazescope/error.hpp"
#include "mazescope/nn/layers.hpp"

namespace mazescope::analysis {

std::string_view action_name(EffectiveAction action) noexcept {
  switch (action) {
    case EffectiveAction::kUp: return "UP";
    case EffectiveAction::kDown: return "DOWN";
    case EffectiveAction::kLeft: return "LEFT";
    case EffectiveAction::kRight: return "RIGHT";
    case EffectiveAction::kNoop: return "NOOP";
  }
  return "?";
}

EffectiveAction parse_action(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto action : kEffectiveActions) {
    if (action_name(action) == upper) return action;
  }
  throw Error(ErrorCode::kParameter, "unknown effective action '" + std::string(name) + "'");
}

ActionTable ActionTable::default_table() {
  using A = EffectiveAction;
  return ActionTable({A::kLeft, A::kLeft, A::kLeft,     // 0 down-left, 1 left, 2 up-left
                      A::kDown, A::kNoop, A::kUp,       // 3 down, 4 idle, 5 up
                      A::kRight, A::kRight, A::kRight,  // 6 down-right, 7 right, 8 up-right
                      A::kNoop, A::kNoop, A::kNoop, A::kNoop, A::kNoop, A::kNoop});
}

ActionTable ActionTable::parse(std::string_view text) {
  std::array<EffectiveAction, kNumPolicyOutputs> mapping{};
  std::size_t count = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (count == kNumPolicyOutputs) throw Error(ErrorCode::kParameter, "action table needs exactly 15 entries");
    mapping[count++] = parse_action(token);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != kNumPolicyOutputs) throw Error(ErrorCode::kParameter, "action table needs exactly 15 entries");
  return ActionTable(mapping);
}

std::vector<std::size_t> ActionTable::outputs_for(EffectiveAction action) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mapping_.size(); ++i) {
    if (mapping_[i] == action) out.push_back(i);
  }
  return out;
}

std::array<double, kNumEffectiveActions> action_distribution(std::span<const float> logits,
                                                             const ActionTable& table) {
  if (logits.size() != kNumPolicyOutputs) {
    throw Error(ErrorCode::kConfiguration, "expected 15 logits, got " + std::to_string(logits.size()));
  }
  const auto probs = nn::softmax(logits);
  std::array<double, kNumEffectiveActions> out{};
  for (std::size_t i = 0; i < probs.size(); ++i) out[static_cast<std::size_t>(table.action_of(i))] += probs[i];
  return out;
}

}  // namespace mazescope::analysis
