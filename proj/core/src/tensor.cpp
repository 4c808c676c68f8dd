#include "mazescope/tensor.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>

#include "mazescope/error.hpp"

namespace mazescope {

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

static void check_extents(const Shape& shape) {
  for (auto extent : shape) {
    if (extent == 0) {
      throw Error(ErrorCode::kConfiguration, "tensor extents must be positive, got " + shape_to_string(shape));
    }
  }
}

Tensor::Tensor(Shape shape, float fill) : shape_(std::move(shape)) {
  check_extents(shape_);
  values_.assign(shape_numel(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> values) : shape_(std::move(shape)), values_(std::move(values)) {
  check_extents(shape_);
  if (shape_numel(shape_) != values_.size()) {
    throw Error(ErrorCode::kConfiguration, "tensor shape " + shape_to_string(shape_) + " does not match " +
                                               std::to_string(values_.size()) + " values");
  }
}

bool Tensor::all_finite() const noexcept {
  for (float v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Tensor::bitwise_equal(const Tensor& other) const noexcept {
  return shape_ == other.shape_ && values_.size() == other.values_.size() &&
         (values_.empty() || std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(float)) == 0);
}

}  // namespace mazescope
