#include "mazescope/io/tensor_wire.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include "mazescope/error.hpp"

namespace mazescope::io {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_tensor_wire(const Tensor& tensor) {
  std::string out = "TNSR";
  out.reserve(8 + 4 * tensor.rank() + 4 * tensor.numel());
  put_u32(out, static_cast<std::uint32_t>(tensor.rank()));
  for (auto d : tensor.shape()) put_u32(out, static_cast<std::uint32_t>(d));
  for (float v : tensor.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor_wire(std::string_view bytes) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != "TNSR") throw Error(ErrorCode::kFormat, "not a TNSR payload");
  const std::uint32_t ndim = get_u32(bytes, 4);
  if (ndim == 0 || bytes.size() < 8 + 4ull * ndim) throw Error(ErrorCode::kFormat, "TNSR header truncated");
  Shape shape(ndim);
  for (std::uint32_t i = 0; i < ndim; ++i) shape[i] = get_u32(bytes, 8 + 4 * i);
  const std::size_t offset = 8 + 4 * ndim;
  const std::size_t numel = shape_numel(shape);
  if (bytes.size() != offset + 4 * numel) throw Error(ErrorCode::kFormat, "TNSR payload length mismatch");
  std::vector<float> values(numel);
  for (std::size_t i = 0; i < numel; ++i) values[i] = std::bit_cast<float>(get_u32(bytes, offset + 4 * i));
  return Tensor(std::move(shape), std::move(values));
}

}  // namespace mazescope::io
