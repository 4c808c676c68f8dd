#pragma once

#include <cstdint>
#include <string>

#include "mazescope/image.hpp"
#include "mazescope/maze/maze.hpp"
#include "mazescope/tensor.hpp"

namespace mazescope::maze {

struct RenderPalette {
  Rgb block{0x3C, 0x2A, 0x14};
  Rgb floor{0xBF, 0xA6, 0x6A};
  Rgb cheese{0xFF, 0xE9, 0x3E};
  Rgb mouse{0x80, 0x80, 0x80};

  /// Throws kConfiguration unless the four colors are pairwise distinct.
  void validate() const;
};

inline constexpr std::size_t kObservationSize = 64;

/// First pixel row/column painted by world cell `i` of a size-`world` grid:
/// round(i * 64 / world). Ties cannot occur for odd world sizes.
std::size_t cell_pixel_start(int i, int world, std::size_t pixels = kObservationSize);

/// 3 x 64 x 64 channel-first observation, values in [0, 1]. Entities are
/// painted over their whole cell footprint, but only when standing on a free cell.
Tensor render_observation(const MazeGrid& grid, const RenderPalette& palette = {});

/// Nearest-neighbour upscale of the observation (display only; 8 -> 512x512).
RgbImage render_display(const MazeGrid& grid, const RenderPalette& palette = {}, std::size_t scale = 8);

/// How an observation is fed to the network. The network consumes channel-first
/// input; kChannelFirstTransposed also swaps the two spatial axes.
enum class InputLayout { kChannelFirst, kChannelFirstTransposed };

InputLayout parse_input_layout(const std::string& name);
Tensor to_network_input(const Tensor& observation, InputLayout layout);

}  // namespace mazescope::maze
