#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mazescope/analysis/dataset.hpp"

namespace mazescope::analysis {

struct RotationPlane {
  std::size_t axis_a;
  std::size_t axis_b;
  double velocity;  // radians per unit time
};

/// d x 2 projection basis (row-major) and the rotation plan driving it.
struct ProjectionState {
  std::size_t dims = 0;
  std::vector<double> basis;
  std::vector<RotationPlane> plan;

  /// Basis spanned by the first two coordinate axes; plan rotates each
  /// consecutive axis pair (i, i+1) at 1 / (i + 2).
  static ProjectionState initial(std::size_t dims);
  /// Starts from a caller basis, re-orthonormalized; same default plan.
  static ProjectionState from_basis(std::size_t dims, std::vector<double> basis);

  double at(std::size_t axis, std::size_t column) const { return basis[axis * 2 + column]; }
  /// max |B^T B - I|.
  double orthonormality_error() const;
};

std::vector<RotationPlane> default_rotation_plan(std::size_t dims);

/// Applies each plane rotation by velocity * dt, then modified Gram-Schmidt.
/// For d = 2 the projected points turn counter-clockwise by velocity * dt.
ProjectionState grand_tour_step(const ProjectionState& state, double dt);

std::vector<std::array<double, 2>> project(const ProjectionState& state, const PixelDataset& dataset);

}  // namespace mazescope::analysis
