#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mazescope::analysis {

enum class EffectiveAction { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kNoop = 4 };

inline constexpr std::size_t kNumEffectiveActions = 5;
inline constexpr std::size_t kNumPolicyOutputs = 15;
inline constexpr std::array<EffectiveAction, kNumEffectiveActions> kEffectiveActions{
    EffectiveAction::kUp, EffectiveAction::kDown, EffectiveAction::kLeft, EffectiveAction::kRight,
    EffectiveAction::kNoop};

std::string_view action_name(EffectiveAction action) noexcept;
/// Case-insensitive UP/DOWN/LEFT/RIGHT/NOOP; throws kParameter otherwise.
EffectiveAction parse_action(std::string_view name);

/// Maps each of the 15 raw policy outputs onto an effective action.
class ActionTable {
 public:
  /// 1 LEFT, 3 DOWN, 5 UP, 7 RIGHT; diagonals 0, 2 -> LEFT and 6, 8 -> RIGHT;
  /// the remaining seven outputs do nothing.
  static ActionTable default_table();
  /// Comma-separated list of 15 action names.
  static ActionTable parse(std::string_view text);

  explicit ActionTable(std::array<EffectiveAction, kNumPolicyOutputs> mapping) : mapping_(mapping) {}

  EffectiveAction action_of(std::size_t output) const { return mapping_.at(output); }
  std::vector<std::size_t> outputs_for(EffectiveAction action) const;
  const std::array<EffectiveAction, kNumPolicyOutputs>& mapping() const noexcept { return mapping_; }

 private:
  std::array<EffectiveAction, kNumPolicyOutputs> mapping_;
};

/// Softmax over the logits, summed per effective action (UP, DOWN, LEFT, RIGHT, NOOP).
std::array<double, kNumEffectiveActions> action_distribution(std::span<const float> logits,
                                                             const ActionTable& table);

}  // namespace mazescope::analysis
