#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mazescope/nn/forward.hpp"
#include "mazescope/tensor.hpp"

namespace mazescope::analysis {

/// Pixels of one layer as points in R^channels. Point k is the channel
/// vector at spatial position (k / width, k % width).
struct PixelDataset {
  std::string layer;
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;  // size() * channels, row-major by point

  std::size_t size() const noexcept { return height * width; }
  std::size_t dims() const noexcept { return channels; }
  std::span<const float> point(std::size_t k) const { return {values.data() + k * channels, channels}; }
  std::size_t row_of(std::size_t k) const noexcept { return k / width; }
  std::size_t col_of(std::size_t k) const noexcept { return k % width; }
  std::size_t index_of(std::size_t row, std::size_t col) const noexcept { return row * width + col; }
};

/// Accepts C x H x W, or a rank-1 tensor treated as C x 1 x 1.
PixelDataset flatten_activations(const Tensor& activations, std::string layer = {});
/// Throws kNotFound when the layer was not captured.
PixelDataset flatten_activations(const nn::ActivationTrace& trace, const std::string& layer);

/// Per-channel z-scoring; constant channels become zero.
PixelDataset standardize(const PixelDataset& dataset);

}  // namespace mazescope::analysis
