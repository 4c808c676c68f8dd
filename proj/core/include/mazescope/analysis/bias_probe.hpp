#pragma once

#include <cstdint>

#include "mazescope/analysis/actions.hpp"
#include "mazescope/maze/render.hpp"
#include "mazescope/nn/forward.hpp"

namespace mazescope::analysis {

struct BiasProbeOptions {
  std::size_t mazes = 100;
  std::uint64_t seed = 0;
  int min_size = 5;
  int max_size = 25;
  /// 0 selects 4 * size * size.
  std::size_t max_steps = 0;
  maze::InputLayout layout = maze::InputLayout::kChannelFirst;
};

struct BiasProbeReport {
  std::size_t mazes = 0;
  std::size_t reached_top_right = 0;
  double top_right_rate = 0.0;
  std::size_t steps = 0;
  double mean_up_mass = 0.0;
  double mean_right_mass = 0.0;
};

/// Rolls the policy out on cheese-free mazes (mouse starting bottom-left),
/// sampling effective actions from the aggregated distribution; a move into
/// a wall leaves the mouse in place. A rollout ends when the mouse reaches
/// the top-right room or the step budget runs out. Report-only.
BiasProbeReport run_bias_probe(const nn::NetworkSpec& spec, const nn::WeightStore& weights,
                               const BiasProbeOptions& options = {},
                               const ActionTable& table = ActionTable::default_table(),
                               const maze::RenderPalette& palette = {});

}  // namespace mazescope::analysis
