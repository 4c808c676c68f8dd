#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "mazescope/nn/network_spec.hpp"
#include "mazescope/tensor.hpp"

namespace mazescope::nn {

struct LayerParams {
  Tensor kernel;
  Tensor bias;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// Parameter tensors keyed by layer name. Immutable once handed to the forward pass.
class WeightStore {
 public:
  void set(std::string layer, LayerParams params);
  const LayerParams& at(const std::string& layer) const;
  const LayerParams* find(const std::string& layer) const noexcept;
  bool contains(const std::string& layer) const noexcept { return params_.contains(layer); }

  const std::map<std::string, LayerParams>& entries() const noexcept { return params_; }
  std::size_t size() const noexcept { return params_.size(); }

  /// CRC32 over the canonical IMPW encoding; used as a cache key.
  std::uint32_t checksum() const;

  friend bool operator==(const WeightStore&, const WeightStore&) = default;

 private:
  std::map<std::string, LayerParams> params_;
};

/// Throws kConfiguration naming the first missing or mis-shaped layer.
void validate_weights(const WeightStore& store, const NetworkSpec& spec);

/// Uniform in [-s, s] with s = 1/sqrt(fan_in), kernel and bias alike.
WeightStore init_random_weights(const NetworkSpec& spec, std::uint64_t seed);

/// IMPW little-endian container.
///   "IMPW" | version u32 = 1 | count u32 |
///   per tensor: name_len u16, name, ndim u8, dims u32 x ndim, float32 payload |
///   CRC32 (zlib polynomial) of all preceding bytes.
/// Tensors are named "<layer>.weight" and "<layer>.bias".
std::string encode_impw(const WeightStore& store);
WeightStore decode_impw(std::string_view bytes);

void save_weights(const WeightStore& store, const std::filesystem::path& path);
WeightStore load_weights(const std::filesystem::path& path);
/// Loads and validates against the spec.
WeightStore load_weights(const std::filesystem::path& path, const NetworkSpec& spec);

}  // namespace mazescope::nn
