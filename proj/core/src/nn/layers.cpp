#include "mazescope/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"
#include "mazescope/error.hpp"

namespace mazescope::nn {

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw Error(ErrorCode::kConfiguration,
              std::string(op) + ": shape mismatch between " + shape_to_string(a) + " and " + shape_to_string(b));
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
  if (input.rank() != 3 || kernel.rank() != 4 || kernel.dim(1) != input.dim(0) || kernel.dim(2) != 3 ||
      kernel.dim(3) != 3) {
    shape_error("conv2d", input.shape(), kernel.shape());
  }
  if (bias.rank() != 1 || bias.dim(0) != kernel.dim(0)) shape_error("conv2d bias", kernel.shape(), bias.shape());
  const std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2), o = kernel.dim(0);
  Tensor out({o, h, w});
  kernels::conv3x3(input.data().data(), c, h, w, kernel.data().data(), bias.data().data(), o, out.data().data());
  return out;
}

PoolResult maxpool_forward(const Tensor& input) {
  if (input.rank() != 3) {
    throw Error(ErrorCode::kConfiguration, "maxpool: expected C x H x W, got " +
                                               shape_to_string(input.shape()));
  }
  const std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  PoolResult result{Tensor({c, kernels::pooled(h), kernels::pooled(w)}), {}};
  result.argmax.resize(result.output.numel());
  kernels::maxpool3x3s2(input.data().data(), c, h, w, result.output.data().data(), result.argmax.data());
  return result;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (float& v : out.data()) v = std::max(v, 0.0f);
  return out;
}

Tensor resadd(const Tensor& branch, const Tensor& skip) {
  if (branch.shape() != skip.shape()) shape_error("resadd", branch.shape(), skip.shape());
  Tensor out = branch;
  auto dst = out.data();
  auto src = skip.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

Tensor flatten(const Tensor& input) { return Tensor({input.numel()}, input.values()); }

Tensor dense_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
  if (kernel.rank() != 2 || input.numel() != kernel.dim(1)) shape_error("dense", input.shape(), kernel.shape());
  if (bias.rank() != 1 || bias.dim(0) != kernel.dim(0)) shape_error("dense bias", kernel.shape(), bias.shape());
  Tensor out({kernel.dim(0)});
  kernels::dense(input.data().data(), kernel.dim(1), kernel.data().data(), bias.data().data(), kernel.dim(0),
                 out.data().data());
  return out;
}

std::vector<double> softmax(std::span<const float> logits) {
  std::vector<double> probs(logits.size());
  if (logits.empty()) return probs;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(static_cast<double>(logits[i]) - peak);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace mazescope::nn
