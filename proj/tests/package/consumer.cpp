#include <iostream>

#include "mazescope/maze/maze.hpp"
#include "mazescope/maze/render.hpp"
#include "mazescope/nn/forward.hpp"
#include "mazescope/nn/weights.hpp"

int main() {
  using namespace mazescope;
  const auto spec = nn::NetworkSpec::impala();
  const auto weights = nn::init_random_weights(spec, 0);
  const auto trace =
      nn::forward_with_capture(spec, weights, maze::render_observation(maze::generate_kruskal(42, 15)));
  std::cout << "logits " << trace.logits.numel() << " checksum " << weights.checksum() << '\n';
  return trace.logits.numel() == 15 && weights.checksum() == 752547208u ? 0 : 1;
}
