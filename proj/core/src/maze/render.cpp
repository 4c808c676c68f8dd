#include "mazescope/maze/render.hpp"

#include <cmath>

#include "mazescope/error.hpp"

namespace mazescope::maze {

void RenderPalette::validate() const {
  const Rgb colors[4] = {block, floor, cheese, mouse};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (colors[i] == colors[j]) throw Error(ErrorCode::kConfiguration, "render palette colors must be distinct");
    }
  }
}

std::size_t cell_pixel_start(int i, int world, std::size_t pixels) {
  // round(i * pixels / world) with integer arithmetic.
  const auto num = 2 * static_cast<std::size_t>(i) * pixels + static_cast<std::size_t>(world);
  return num / (2 * static_cast<std::size_t>(world));
}

Tensor render_observation(const MazeGrid& grid, const RenderPalette& palette) {
  palette.validate();
  const int n = grid.size();
  constexpr std::size_t kPix = kObservationSize;
  Tensor obs({3, kPix, kPix});
  auto paint = [&](GridPos cell, Rgb color) {
    const float rgb[3] = {color.r / 255.0f, color.g / 255.0f, color.b / 255.0f};
    const std::size_t y0 = cell_pixel_start(cell.row, n), y1 = cell_pixel_start(cell.row + 1, n);
    const std::size_t x0 = cell_pixel_start(cell.col, n), x1 = cell_pixel_start(cell.col + 1, n);
    for (std::size_t ch = 0; ch < 3; ++ch) {
      for (std::size_t y = y0; y < y1; ++y) {
        for (std::size_t x = x0; x < x1; ++x) obs.at(ch, y, x) = rgb[ch];
      }
    }
  };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) paint({r, c}, grid.at({r, c}) == Cell::kFree ? palette.floor : palette.block);
  }
  if (grid.cheese() && grid.is_free(*grid.cheese())) paint(*grid.cheese(), palette.cheese);
  if (grid.is_free(grid.mouse())) paint(grid.mouse(), palette.mouse);
  return obs;
}

RgbImage render_display(const MazeGrid& grid, const RenderPalette& palette, std::size_t scale) {
  if (scale == 0) throw Error(ErrorCode::kParameter, "display scale must be positive");
  const Tensor obs = render_observation(grid, palette);
  RgbImage image(kObservationSize * scale, kObservationSize * scale);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      auto byte = [&](std::size_t ch) {
        return static_cast<std::uint8_t>(std::lround(obs.at(ch, y / scale, x / scale) * 255.0f));
      };
      image.set(x, y, {byte(0), byte(1), byte(2)});
    }
  }
  return image;
}

InputLayout parse_input_layout(const std::string& name) {
  if (name == "chw") return InputLayout::kChannelFirst;
  if (name == "chw-transposed") return InputLayout::kChannelFirstTransposed;
  throw Error(ErrorCode::kParameter, "unknown input layout '" + name + "' (expected chw or chw-transposed)");
}

Tensor to_network_input(const Tensor& observation, InputLayout layout) {
  if (layout == InputLayout::kChannelFirst) return observation;
  if (observation.rank() != 3) throw Error(ErrorCode::kConfiguration, "observation must be C x H x W");
  const std::size_t c = observation.dim(0), h = observation.dim(1), w = observation.dim(2);
  Tensor out({c, w, h});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) out.at(ch, x, y) = observation.at(ch, y, x);
    }
  }
  return out;
}

}  // namespace mazescope::maze
