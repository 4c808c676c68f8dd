#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mazescope/analysis/classification.hpp"
#include "mazescope/analysis/dataset.hpp"
#include "mazescope/analysis/run_control.hpp"

namespace mazescope::analysis {

struct KMeansOptions {
  std::size_t k = 8;
  std::uint64_t seed = 0;
  std::size_t max_iters = 300;
  double tol = 1e-6;
};

struct KMeansResult {
  Classification classification;  // ids 0..k-1
  std::vector<double> centroids;   // k x dims
  /// Inertia after each assignment step.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;
  bool converged = false;
};

/// k-means++ seeding, then Lloyd iterations. Stops when the assignment is
/// unchanged, the inertia improvement drops below tol, or max_iters is hit.
/// Empty clusters are re-seeded from the point farthest from its centroid.
KMeansResult kmeans(const PixelDataset& dataset, const KMeansOptions& options, const RunControl& control = {});

struct AgglomerativeOptions {
  /// Merge while the average-linkage distance is strictly below this value.
  std::optional<double> threshold;
  /// Stop once this many clusters remain.
  std::optional<std::size_t> count;
};

struct Merge {
  std::size_t a;  // surviving slot (smaller index)
  std::size_t b;  // absorbed slot
  double distance;
  std::size_t size;  // members after the merge
};

struct AgglomerativeResult {
  Classification classification;
  std::vector<Merge> merges;
};

/// Bottom-up average linkage on Euclidean distances. Ties are broken by
/// the smallest (i, j) slot pair; a merged cluster keeps the smaller slot.
AgglomerativeResult agglomerative(const PixelDataset& dataset, const AgglomerativeOptions& options,
                                  const RunControl& control = {});

}  // namespace mazescope::analysis
