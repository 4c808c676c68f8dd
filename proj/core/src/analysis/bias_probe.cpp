#include "mazescope/analysis/bias_probe.hpp"

#include <random>

#include "mazescope/error.hpp"

namespace mazescope::analysis {

BiasProbeReport run_bias_probe(const nn::NetworkSpec& spec, const nn::WeightStore& weights,
                               const BiasProbeOptions& options, const ActionTable& table,
                               const maze::RenderPalette& palette) {
  if (options.min_size > options.max_size) throw Error(ErrorCode::kParameter, "min_size exceeds max_size");
  maze::check_world_size(options.min_size);
  maze::check_world_size(options.max_size);
  if (options.min_size < 5) throw Error(ErrorCode::kParameter, "probe mazes need at least two rooms per side");

  std::mt19937_64 rng(options.seed);
  auto draw = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const int size_choices = (options.max_size - options.min_size) / 2 + 1;

  BiasProbeReport report;
  double up_mass = 0.0, right_mass = 0.0;
  for (std::size_t m = 0; m < options.mazes; ++m) {
    const int size = options.min_size + 2 * static_cast<int>(draw() * size_choices);
    maze::GenerateOptions gen;
    gen.place_cheese = false;
    maze::MazeGrid grid = maze::generate_kruskal(rng(), size, gen);
    const maze::GridPos goal = maze::top_right_room(size);
    const std::size_t budget = options.max_steps ? options.max_steps : static_cast<std::size_t>(4 * size * size);

    for (std::size_t step = 0; step < budget && grid.mouse() != goal; ++step) {
      const Tensor input = maze::to_network_input(maze::render_observation(grid, palette), options.layout);
      const auto trace = nn::forward_with_capture(spec, weights, input);
      const auto dist = action_distribution(trace.logits.data(), table);
      up_mass += dist[static_cast<std::size_t>(EffectiveAction::kUp)];
      right_mass += dist[static_cast<std::size_t>(EffectiveAction::kRight)];
      ++report.steps;

      const double u = draw();
      double acc = 0.0;
      EffectiveAction chosen = EffectiveAction::kNoop;
      for (auto action : kEffectiveActions) {
        acc += dist[static_cast<std::size_t>(action)];
        if (u < acc) {
          chosen = action;
          break;
        }
      }
      maze::GridPos next = grid.mouse();
      switch (chosen) {
        case EffectiveAction::kUp: --next.row; break;
        case EffectiveAction::kDown: ++next.row; break;
        case EffectiveAction::kLeft: --next.col; break;
        case EffectiveAction::kRight: ++next.col; break;
        case EffectiveAction::kNoop: break;
      }
      if (next != grid.mouse() && grid.is_free(next)) grid = grid.with_mouse(next);
    }
    ++report.mazes;
    if (grid.mouse() == goal) ++report.reached_top_right;
  }
  report.top_right_rate = report.mazes ? static_cast<double>(report.reached_top_right) / report.mazes : 0.0;
  report.mean_up_mass = report.steps ? up_mass / static_cast<double>(report.steps) : 0.0;
  report.mean_right_mass = report.steps ? right_mass / static_cast<double>(report.steps) : 0.0;
  return report;
}

}  // namespace mazescope::analysis
