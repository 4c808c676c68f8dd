#include "mazescope/analysis/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mazescope/error.hpp"

namespace mazescope::analysis {

SymmetricEigen symmetric_eigen(std::vector<double> a, std::size_t d) {
  if (a.size() != d * d) throw Error(ErrorCode::kConfiguration, "eigen solver expects a d x d matrix");
  std::vector<double> v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * d + j]; };

  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) off += A(p, q) * A(p, q);
    }
    if (off <= 1e-30 * scale * scale || off == 0.0) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        // symmetric Schur decomposition of the (p, q) block
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v[k * d + p], vkq = v[k * d + q];
          v[k * d + p] = c * vkp - s * vkq;
          v[k * d + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return A(i, i) > A(j, j); });
  SymmetricEigen out;
  out.values.resize(d);
  out.vectors.resize(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    out.values[j] = A(order[j], order[j]);
    for (std::size_t k = 0; k < d; ++k) out.vectors[k * d + j] = v[k * d + order[j]];
  }
  return out;
}

PcaResult pca(const PixelDataset& dataset, std::size_t components) {
  const std::size_t n = dataset.size();
  const std::size_t d = dataset.dims();
  if (n < 2) throw Error(ErrorCode::kParameter, "PCA needs at least two points");
  if (components < 1 || components > d) {
    throw Error(ErrorCode::kParameter, "PCA components must be within [1, " + std::to_string(d) + "]");
  }
  PcaResult out;
  out.dims = d;
  out.components = components;
  out.mean.assign(d, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = dataset.point(k);
    for (std::size_t i = 0; i < d; ++i) out.mean[i] += p[i];
  }
  for (double& m : out.mean) m /= static_cast<double>(n);

  std::vector<double> cov(d * d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = dataset.point(k);
    for (std::size_t i = 0; i < d; ++i) centered[i] = p[i] - out.mean[i];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) cov[i * d + j] += centered[i] * centered[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov[i * d + j] /= static_cast<double>(n - 1);
      cov[j * d + i] = cov[i * d + j];
    }
  }

  const auto eig = symmetric_eigen(std::move(cov), d);
  double total = 0.0;
  for (double v : eig.values) total += std::max(v, 0.0);
  out.basis.resize(d * components);
  for (std::size_t j = 0; j < components; ++j) {
    const double var = std::max(eig.values[j], 0.0);
    out.explained_variance.push_back(var);
    out.explained_ratio.push_back(total > 0 ? var / total : 0.0);
    for (std::size_t i = 0; i < d; ++i) out.basis[i * components + j] = eig.vectors[i * d + j];
  }
  return out;
}

}  // namespace mazescope::analysis
