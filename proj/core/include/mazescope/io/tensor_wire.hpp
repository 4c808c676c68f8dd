#pragma once

#include <string>
#include <string_view>

#include "mazescope/tensor.hpp"

namespace mazescope::io {

/// Binary tensor payload: "TNSR", ndim u32, dims u32 x ndim, then float32
/// values; all little-endian. The header is 8 + 4 * ndim bytes.
std::string encode_tensor_wire(const Tensor& tensor);
Tensor decode_tensor_wire(std::string_view bytes);

inline constexpr std::string_view kTensorContentType = "application/x-mazescope-tensor";

}  // namespace mazescope::io
