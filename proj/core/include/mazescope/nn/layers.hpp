#pragma once

#include <cstdint>
#include <vector>

#include "mazescope/tensor.hpp"

namespace mazescope::nn {

/// 3x3 convolution, stride 1, zero same-padding.
/// input C x H x W, kernel O x C x 3 x 3, bias O  ->  O x H x W.
Tensor conv2d_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias);

struct PoolResult {
  Tensor output;
  /// Flat input offset (within the whole C x H x W tensor) of each output's maximum.
  std::vector<std::uint32_t> argmax;
};

/// 3x3 window, stride 2, one cell of padding on each side: C x ceil(H/2) x ceil(W/2).
PoolResult maxpool_forward(const Tensor& input);

Tensor relu(const Tensor& input);
Tensor resadd(const Tensor& branch, const Tensor& skip);
Tensor flatten(const Tensor& input);

/// kernel is out x in (row-major), bias is out.
Tensor dense_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias);

/// Numerically stable softmax (max subtracted before exponentiation).
std::vector<double> softmax(std::span<const float> logits);

}  // namespace mazescope::nn
