#include "mazescope/analysis/dataset.hpp"

#include <cmath>

#include "mazescope/error.hpp"

namespace mazescope::analysis {

PixelDataset flatten_activations(const Tensor& activations, std::string layer) {
  PixelDataset ds;
  ds.layer = std::move(layer);
  if (activations.rank() == 3) {
    ds.channels = activations.dim(0);
    ds.height = activations.dim(1);
    ds.width = activations.dim(2);
  } else if (activations.rank() == 1) {
    ds.channels = activations.dim(0);
    ds.height = ds.width = 1;
  } else {
    throw Error(ErrorCode::kConfiguration,
                "cannot flatten activations of shape " + shape_to_string(activations.shape()));
  }
  const std::size_t n = ds.size();
  ds.values.resize(n * ds.channels);
  const auto src = activations.data();
  for (std::size_t c = 0; c < ds.channels; ++c) {
    for (std::size_t k = 0; k < n; ++k) ds.values[k * ds.channels + c] = src[c * n + k];
  }
  return ds;
}

PixelDataset flatten_activations(const nn::ActivationTrace& trace, const std::string& layer) {
  auto it = trace.layers.find(layer);
  if (it == trace.layers.end()) throw Error(ErrorCode::kNotFound, "layer " + layer + " was not captured", layer);
  return flatten_activations(it->second, layer);
}

PixelDataset standardize(const PixelDataset& dataset) {
  PixelDataset out = dataset;
  const std::size_t n = dataset.size(), d = dataset.channels;
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += dataset.values[k * d + c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double diff = dataset.values[k * d + c] - mean;
      var += diff * diff;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
      out.values[k * d + c] = sd > 0 ? static_cast<float>((dataset.values[k * d + c] - mean) / sd) : 0.0f;
    }
  }
  return out;
}

}  // namespace mazescope::analysis
