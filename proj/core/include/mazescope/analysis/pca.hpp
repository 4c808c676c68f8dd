#pragma once

#include <cstddef>
#include <vector>

#include "mazescope/analysis/dataset.hpp"

namespace mazescope::analysis {

struct SymmetricEigen {
  std::vector<double> values;   // descending
  std::vector<double> vectors;  // d x d row-major; column j pairs with values[j]
};

/// Cyclic Jacobi sweeps on a symmetric d x d row-major matrix.
SymmetricEigen symmetric_eigen(std::vector<double> matrix, std::size_t d);

struct PcaResult {
  std::size_t dims = 0;
  std::size_t components = 0;
  std::vector<double> mean;
  std::vector<double> basis;  // dims x components row-major, orthonormal columns
  std::vector<double> explained_variance;
  std::vector<double> explained_ratio;

  double component(std::size_t axis, std::size_t j) const { return basis[axis * components + j]; }
};

/// Mean-centered sample covariance (n - 1) eigendecomposition.
PcaResult pca(const PixelDataset& dataset, std::size_t components = 2);

}  // namespace mazescope::analysis
