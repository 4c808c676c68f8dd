#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mazescope {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// "#RRGGBB" (uppercase on output, either case accepted on input).
std::string to_hex(Rgb color);
Rgb parse_hex_color(std::string_view text);

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(std::size_t w, std::size_t h) : width(w), height(h), pixels(w * h * 3, 0) {}

  Rgb get(std::size_t x, std::size_t y) const {
    const auto* p = &pixels[(y * width + x) * 3];
    return {p[0], p[1], p[2]};
  }
  void set(std::size_t x, std::size_t y, Rgb c) {
    auto* p = &pixels[(y * width + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
};

void write_png(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_png(const std::filesystem::path& path);

/// Three-stop diverging colormap: low -> mid -> high.
struct DivergingColormap {
  Rgb low{0x5E, 0x3C, 0x99};   // purple
  Rgb mid{0xF7, 0xF7, 0xF7};   // white
  Rgb high{0x1B, 0x78, 0x37};  // green

  /// t in [-1, 1]; values outside are clamped.
  Rgb map(double t) const;
};

/// Field rendered with values scaled symmetrically by max |value|.
RgbImage colormap_field(std::span<const float> values, std::size_t width, std::size_t height,
                        const DivergingColormap& cmap = {});

/// Heatmap of a non-negative field (scaled by its max) alpha-blended over a base image.
RgbImage overlay_heatmap(const RgbImage& base, std::span<const float> field, double alpha = 0.6);

}  // namespace mazescope
