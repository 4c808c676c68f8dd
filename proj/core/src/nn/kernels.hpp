#pragma once

// Compute kernels shared by the float32 forward/backward passes and the
// float64 evaluation route.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace mazescope::nn::kernels {

inline std::size_t pooled(std::size_t n) { return (n + 1) / 2; }

template <class T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Unfolds every 3x3 zero-padded neighbourhood into a (C*9) x (H*W) matrix;
/// row c*9 + ky*3 + kx, column y*W + x holds in[c, y+ky-1, x+kx-1].
template <class T>
void im2col3x3(const T* __restrict in, std::size_t channels, std::size_t height, std::size_t width,
               T* __restrict cols) {
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  const std::size_t plane = height * width;
  for (std::size_t c = 0; c < channels; ++c) {
    const T* src = in + c * plane;
    for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
      for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
        T* row = cols + (c * 9 + static_cast<std::size_t>(ky * 3 + kx)) * plane;
        for (std::ptrdiff_t y = 0; y < h; ++y) {
          const std::ptrdiff_t iy = y + ky - 1;
          T* dst = row + y * w;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + w, T(0));
            continue;
          }
          for (std::ptrdiff_t x = 0; x < w; ++x) {
            const std::ptrdiff_t ix = x + kx - 1;
            dst[x] = (ix < 0 || ix >= w) ? T(0) : src[iy * w + ix];
          }
        }
      }
    }
  }
}

/// Adjoint of im2col3x3: scatters the column matrix back onto the input grid.
template <class T>
void col2im3x3_add(const T* __restrict cols, std::size_t channels, std::size_t height, std::size_t width,
                   T* __restrict out) {
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  const std::size_t plane = height * width;
  for (std::size_t c = 0; c < channels; ++c) {
    T* dst = out + c * plane;
    for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
      for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
        const T* row = cols + (c * 9 + static_cast<std::size_t>(ky * 3 + kx)) * plane;
        for (std::ptrdiff_t y = 0; y < h; ++y) {
          const std::ptrdiff_t iy = y + ky - 1;
          if (iy < 0 || iy >= h) continue;
          for (std::ptrdiff_t x = 0; x < w; ++x) {
            const std::ptrdiff_t ix = x + kx - 1;
            if (ix >= 0 && ix < w) dst[iy * w + ix] += row[y * w + x];
          }
        }
      }
    }
  }
}

template <class T>
std::vector<T>& scratch(std::size_t size) {
  thread_local std::vector<T> buffer;
  if (buffer.size() < size) buffer.resize(size);
  return buffer;
}

/// 3x3 same-padded convolution as a GEMM: out (O x HW) = K (O x C*9) * im2col(in) + bias.
template <class T>
void conv3x3(const T* in, std::size_t channels, std::size_t height, std::size_t width, const T* kernel,
             const T* bias, std::size_t out_channels, T* out) {
  const auto plane = static_cast<Eigen::Index>(height * width);
  const auto depth = static_cast<Eigen::Index>(channels * 9);
  auto& cols = scratch<T>(static_cast<std::size_t>(depth * plane));
  im2col3x3(in, channels, height, width, cols.data());
  Eigen::Map<const RowMatrix<T>> k(kernel, static_cast<Eigen::Index>(out_channels), depth);
  Eigen::Map<const RowMatrix<T>> x(cols.data(), depth, plane);
  Eigen::Map<RowMatrix<T>> y(out, static_cast<Eigen::Index>(out_channels), plane);
  y.noalias() = k * x;
  y.colwise() += Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>(bias, static_cast<Eigen::Index>(out_channels));
}

/// grad_in (C x H x W) += transpose-convolution of grad_out (O x H x W).
template <class T>
void conv3x3_backward_input(const T* grad_out, std::size_t out_channels, std::size_t height, std::size_t width,
                            const T* kernel, std::size_t channels, T* grad_in) {
  const auto plane = static_cast<Eigen::Index>(height * width);
  const auto depth = static_cast<Eigen::Index>(channels * 9);
  auto& cols = scratch<T>(static_cast<std::size_t>(depth * plane));
  Eigen::Map<const RowMatrix<T>> k(kernel, static_cast<Eigen::Index>(out_channels), depth);
  Eigen::Map<const RowMatrix<T>> g(grad_out, static_cast<Eigen::Index>(out_channels), plane);
  Eigen::Map<RowMatrix<T>> gx(cols.data(), depth, plane);
  gx.noalias() = k.transpose() * g;
  col2im3x3_add(cols.data(), channels, height, width, grad_in);
}

/// Window rows 2*oy-1 .. 2*oy+1 (clipped); first maximum in scan order wins.
template <class T>
void maxpool3x3s2(const T* in, std::size_t channels, std::size_t height, std::size_t width, T* out,
                  std::uint32_t* argmax) {
  const std::size_t oh = pooled(height);
  const std::size_t ow = pooled(width);
  for (std::size_t c = 0; c < channels; ++c) {
    const std::size_t base = c * height * width;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      const std::size_t ya = oy == 0 ? 0 : 2 * oy - 1;
      const std::size_t yb = std::min(height, 2 * oy + 2);
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const std::size_t xa = ox == 0 ? 0 : 2 * ox - 1;
        const std::size_t xb = std::min(width, 2 * ox + 2);
        std::size_t best = base + ya * width + xa;
        for (std::size_t y = ya; y < yb; ++y) {
          for (std::size_t x = xa; x < xb; ++x) {
            const std::size_t idx = base + y * width + x;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const std::size_t o = (c * oh + oy) * ow + ox;
        out[o] = in[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
}

template <class T, class P>
void dense(const T* __restrict in, std::size_t in_features, const P* __restrict kernel, const P* __restrict bias,
           std::size_t out_features, T* __restrict out) {
  for (std::size_t o = 0; o < out_features; ++o) {
    T acc = static_cast<T>(bias[o]);
    const P* row = kernel + o * in_features;
    for (std::size_t i = 0; i < in_features; ++i) acc += static_cast<T>(row[i]) * in[i];
    out[o] = acc;
  }
}

template <class T, class P>
void dense_backward_input(const T* __restrict grad_out, std::size_t out_features, const P* __restrict kernel,
                          std::size_t in_features, T* __restrict grad_in) {
  for (std::size_t o = 0; o < out_features; ++o) {
    const T g = grad_out[o];
    const P* row = kernel + o * in_features;
    for (std::size_t i = 0; i < in_features; ++i) grad_in[i] += static_cast<T>(row[i]) * g;
  }
}

}  // namespace mazescope::nn::kernels
