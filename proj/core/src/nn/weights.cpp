#include "mazescope/nn/weights.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "mazescope/error.hpp"

namespace mazescope::nn {

namespace {

constexpr char kMagic[4] = {'I', 'M', 'P', 'W'};
constexpr std::uint32_t kVersion = 1;

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }
void put_u16(std::string& out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_tensor(std::string& out, const std::string& name, const Tensor& t) {
  if (name.size() > 0xFFFF) throw Error(ErrorCode::kFormat, "tensor name too long: " + name);
  if (t.rank() > 0xFF) throw Error(ErrorCode::kFormat, "tensor rank too large: " + name);
  put_u16(out, static_cast<std::uint16_t>(name.size()));
  out += name;
  put_u8(out, static_cast<std::uint8_t>(t.rank()));
  for (auto d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
  for (float v : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint32_t u(int width) {
    need(static_cast<std::size_t>(width));
    std::uint32_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::kFormat, "IMPW data truncated at byte " + std::to_string(pos_));
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - off, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(n));
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void WeightStore::set(std::string layer, LayerParams params) { params_[std::move(layer)] = std::move(params); }

const LayerParams& WeightStore::at(const std::string& layer) const {
  if (const auto* p = find(layer)) return *p;
  throw Error(ErrorCode::kNotFound, "no weights for layer " + layer);
}

const LayerParams* WeightStore::find(const std::string& layer) const noexcept {
  auto it = params_.find(layer);
  return it == params_.end() ? nullptr : &it->second;
}

std::uint32_t WeightStore::checksum() const {
  // The encoding ends with the CRC of everything before it.
  const auto bytes = encode_impw(*this);
  std::uint32_t crc = 0;
  for (int i = 0; i < 4; ++i) crc |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[bytes.size() - 4 + i])) << (8 * i);
  return crc;
}

void validate_weights(const WeightStore& store, const NetworkSpec& spec) {
  for (const auto& layer : spec.layers()) {
    if (!layer.has_parameters()) continue;
    const auto* params = store.find(layer.name);
    if (params == nullptr) {
      throw Error(ErrorCode::kConfiguration, "weights missing for layer " + layer.name, layer.name);
    }
    if (params->kernel.shape() != layer.kernel_shape) {
      throw Error(ErrorCode::kConfiguration,
                  "layer " + layer.name + ": kernel shape " + shape_to_string(params->kernel.shape()) +
                      " does not match expected " + shape_to_string(layer.kernel_shape),
                  layer.name);
    }
    if (params->bias.shape() != layer.bias_shape) {
      throw Error(ErrorCode::kConfiguration,
                  "layer " + layer.name + ": bias shape " + shape_to_string(params->bias.shape()) +
                      " does not match expected " + shape_to_string(layer.bias_shape),
                  layer.name);
    }
    if (!params->kernel.all_finite() || !params->bias.all_finite()) {
      throw Error(ErrorCode::kConfiguration, "layer " + layer.name + " has non-finite weights", layer.name);
    }
  }
}

WeightStore init_random_weights(const NetworkSpec& spec, std::uint64_t seed) {
  // mt19937_64 output is fully specified; the float conversion below is ours,
  // so stores are identical across standard libraries.
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](float scale) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    return static_cast<float>((2.0 * unit - 1.0) * scale);
  };
  WeightStore store;
  for (const auto& layer : spec.layers()) {
    if (!layer.has_parameters()) continue;
    const std::size_t fan_in = shape_numel(layer.kernel_shape) / layer.kernel_shape[0];
    const float scale = static_cast<float>(1.0 / std::sqrt(static_cast<double>(fan_in)));
    LayerParams params{Tensor(layer.kernel_shape), Tensor(layer.bias_shape)};
    for (float& v : params.kernel.data()) v = uniform(scale);
    for (float& v : params.bias.data()) v = uniform(scale);
    store.set(layer.name, std::move(params));
  }
  return store;
}

std::string encode_impw(const WeightStore& store) {
  std::string out(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(store.size() * 2));
  for (const auto& [name, params] : store.entries()) {
    put_tensor(out, name + ".weight", params.kernel);
    put_tensor(out, name + ".bias", params.bias);
  }
  put_u32(out, crc_of(out));
  return out;
}

WeightStore decode_impw(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kFormat, "bad magic: not an IMPW weight file");
  }
  Reader r(bytes);
  r.take(4);
  const auto version = r.u(4);
  if (version != kVersion) throw Error(ErrorCode::kFormat, "unsupported IMPW version " + std::to_string(version));
  const auto count = r.u(4);

  std::map<std::string, Tensor> weights, biases;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.u(2);
    std::string name(r.take(name_len));
    const auto ndim = r.u(1);
    Shape shape(ndim);
    for (auto& d : shape) d = r.u(4);
    const std::size_t numel = shape_numel(shape);
    if (numel > (bytes.size() - r.pos()) / 4) {
      throw Error(ErrorCode::kFormat, "IMPW data truncated in tensor " + name);
    }
    std::vector<float> values(numel);
    for (auto& v : values) v = std::bit_cast<float>(r.u(4));
    Tensor t;
    try {
      t = Tensor(std::move(shape), std::move(values));
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormat, "tensor " + name + ": " + e.what());
    }
    auto split = [&name](std::string_view suffix) -> std::optional<std::string> {
      if (name.size() > suffix.size() && name.ends_with(suffix)) return name.substr(0, name.size() - suffix.size());
      return std::nullopt;
    };
    if (auto layer = split(".weight")) {
      weights[*layer] = std::move(t);
    } else if (auto layer2 = split(".bias")) {
      biases[*layer2] = std::move(t);
    } else {
      throw Error(ErrorCode::kFormat, "tensor name must end in .weight or .bias: " + name);
    }
  }
  const std::size_t body_end = r.pos();
  const auto stored_crc = r.u(4);
  if (stored_crc != crc_of(bytes.substr(0, body_end))) throw Error(ErrorCode::kFormat, "IMPW checksum mismatch");
  if (r.pos() != bytes.size()) throw Error(ErrorCode::kFormat, "trailing bytes after IMPW checksum");

  WeightStore store;
  for (auto& [layer, kernel] : weights) {
    auto it = biases.find(layer);
    if (it == biases.end()) throw Error(ErrorCode::kFormat, "layer " + layer + " has a weight but no bias", layer);
    store.set(layer, LayerParams{std::move(kernel), std::move(it->second)});
    biases.erase(it);
  }
  if (!biases.empty()) {
    throw Error(ErrorCode::kFormat, "layer " + biases.begin()->first + " has a bias but no weight",
                biases.begin()->first);
  }
  return store;
}

void save_weights(const WeightStore& store, const std::filesystem::path& path) {
  const std::string bytes = encode_impw(store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

WeightStore load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open weight file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decode_impw(buffer.str());
}

WeightStore load_weights(const std::filesystem::path& path, const NetworkSpec& spec) {
  WeightStore store = load_weights(path);
  validate_weights(store, spec);
  return store;
}

}  // namespace mazescope::nn
