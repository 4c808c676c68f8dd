#include "mazescope/analysis/grand_tour.hpp"

#include <algorithm>
#include <cmath>

#include "mazescope/error.hpp"

namespace mazescope::analysis {

namespace {

void orthonormalize(std::vector<double>& basis, std::size_t d) {
  auto col = [&](std::size_t i, std::size_t j) -> double& { return basis[i * 2 + j]; };
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t prev = 0; prev < j; ++prev) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += col(i, j) * col(i, prev);
      for (std::size_t i = 0; i < d; ++i) col(i, j) -= dot * col(i, prev);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) norm += col(i, j) * col(i, j);
    norm = std::sqrt(norm);
    if (!(norm > 1e-12)) throw Error(ErrorCode::kConfiguration, "projection basis is rank deficient");
    for (std::size_t i = 0; i < d; ++i) col(i, j) /= norm;
  }
}

}  // namespace

std::vector<RotationPlane> default_rotation_plan(std::size_t dims) {
  std::vector<RotationPlane> plan;
  for (std::size_t i = 0; i + 1 < dims; ++i) plan.push_back({i, i + 1, 1.0 / static_cast<double>(i + 2)});
  return plan;
}

ProjectionState ProjectionState::initial(std::size_t dims) {
  if (dims < 2) throw Error(ErrorCode::kParameter, "projection needs at least two dimensions");
  ProjectionState s;
  s.dims = dims;
  s.basis.assign(dims * 2, 0.0);
  s.basis[0] = 1.0;  // (0, 0)
  s.basis[3] = 1.0;  // (1, 1)
  s.plan = default_rotation_plan(dims);
  return s;
}

ProjectionState ProjectionState::from_basis(std::size_t dims, std::vector<double> basis) {
  if (dims < 2) throw Error(ErrorCode::kParameter, "projection needs at least two dimensions");
  if (basis.size() != dims * 2) throw Error(ErrorCode::kConfiguration, "projection basis must be dims x 2");
  ProjectionState s;
  s.dims = dims;
  s.basis = std::move(basis);
  orthonormalize(s.basis, dims);
  s.plan = default_rotation_plan(dims);
  return s;
}

double ProjectionState::orthonormality_error() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < dims; ++i) dot += at(i, a) * at(i, b);
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

ProjectionState grand_tour_step(const ProjectionState& state, double dt) {
  if (!std::isfinite(dt)) throw Error(ErrorCode::kParameter, "time step must be finite");
  ProjectionState next = state;
  if (dt == 0.0) return next;
  for (const auto& plane : next.plan) {
    if (plane.axis_a >= next.dims || plane.axis_b >= next.dims) {
      throw Error(ErrorCode::kConfiguration, "rotation plane outside the projection dimensions");
    }
    const double angle = plane.velocity * dt;
    const double c = std::cos(angle), s = std::sin(angle);
    for (std::size_t j = 0; j < 2; ++j) {
      double& u = next.basis[plane.axis_a * 2 + j];
      double& v = next.basis[plane.axis_b * 2 + j];
      const double bu = u, bv = v;
      u = c * bu + s * bv;
      v = -s * bu + c * bv;
    }
  }
  orthonormalize(next.basis, next.dims);
  return next;
}

std::vector<std::array<double, 2>> project(const ProjectionState& state, const PixelDataset& dataset) {
  if (dataset.dims() != state.dims) {
    throw Error(ErrorCode::kConfiguration, "dataset has " + std::to_string(dataset.dims()) +
                                               " dims, projection expects " + std::to_string(state.dims));
  }
  std::vector<std::array<double, 2>> out(dataset.size());
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    const auto p = dataset.point(k);
    double x = 0.0, y = 0.0;
    for (std::size_t i = 0; i < state.dims; ++i) {
      x += state.at(i, 0) * p[i];
      y += state.at(i, 1) * p[i];
    }
    out[k] = {x, y};
  }
  return out;
}

}  // namespace mazescope::analysis
