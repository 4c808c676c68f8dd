#include "mazescope/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "mazescope/error.hpp"

namespace mazescope {

std::string to_hex(Rgb color) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", color.r, color.g, color.b);
  return buf;
}

Rgb parse_hex_color(std::string_view text) {
  auto nibble = [&](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    throw Error(ErrorCode::kFormat, "bad color '" + std::string(text) + "' (expected #RRGGBB)");
  };
  if (text.size() != 7 || text[0] != '#') {
    throw Error(ErrorCode::kFormat, "bad color '" + std::string(text) + "' (expected #RRGGBB)");
  }
  auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(nibble(text[i]) * 16 + nibble(text[i + 1])); };
  return {byte(1), byte(3), byte(5)};
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png(const RgbImage& image, const std::filesystem::path& path) {
  if (image.width == 0 || image.height == 0 || image.pixels.size() != image.width * image.height * 3) {
    throw Error(ErrorCode::kParameter, "cannot write an empty or inconsistent image");
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::kIo, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "failed writing PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() + y * image.width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RgbImage read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::kIo, "libpng initialisation failed");
  }
  RgbImage image;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kFormat, "failed reading PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  image = RgbImage(png_get_image_width(png, info), png_get_image_height(png, info));
  for (std::size_t y = 0; y < image.height; ++y) png_read_row(png, image.pixels.data() + y * image.width * 3, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

Rgb DivergingColormap::map(double t) const {
  t = std::clamp(std::isfinite(t) ? t : 0.0, -1.0, 1.0);
  const Rgb& a = mid;
  const Rgb& b = t < 0 ? low : high;
  const double u = std::abs(t);
  auto lerp = [u](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + (static_cast<double>(y) - x) * u));
  };
  return {lerp(a.r, b.r), lerp(a.g, b.g), lerp(a.b, b.b)};
}

RgbImage colormap_field(std::span<const float> values, std::size_t width, std::size_t height,
                        const DivergingColormap& cmap) {
  if (values.size() != width * height) throw Error(ErrorCode::kConfiguration, "field size does not match image size");
  double scale = 0.0;
  for (float v : values) scale = std::max(scale, std::abs(static_cast<double>(v)));
  RgbImage image(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double v = values[y * width + x];
      image.set(x, y, cmap.map(scale > 0 ? v / scale : 0.0));
    }
  }
  return image;
}

RgbImage overlay_heatmap(const RgbImage& base, std::span<const float> field, double alpha) {
  if (field.size() != base.width * base.height) {
    throw Error(ErrorCode::kConfiguration, "heatmap size does not match base image");
  }
  double peak = 0.0;
  for (float v : field) peak = std::max(peak, std::abs(static_cast<double>(v)));
  RgbImage out = base;
  for (std::size_t y = 0; y < base.height; ++y) {
    for (std::size_t x = 0; x < base.width; ++x) {
      const double t = peak > 0 ? std::abs(field[y * base.width + x]) / peak : 0.0;
      // black -> red -> yellow ramp, blended in proportion to intensity
      const Rgb heat{static_cast<std::uint8_t>(std::lround(255 * std::min(1.0, 2 * t))),
                     static_cast<std::uint8_t>(std::lround(255 * std::clamp(2 * t - 1, 0.0, 1.0))), 0};
      const double a = alpha * t;
      const Rgb src = base.get(x, y);
      auto mix = [a](std::uint8_t s, std::uint8_t h) {
        return static_cast<std::uint8_t>(std::lround(s * (1 - a) + h * a));
      };
      out.set(x, y, {mix(src.r, heat.r), mix(src.g, heat.g), mix(src.b, heat.b)});
    }
  }
  return out;
}

}  // namespace mazescope
