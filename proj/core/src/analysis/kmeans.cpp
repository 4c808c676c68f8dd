#include <algorithm>
#include <limits>
#include <random>

#include "mazescope/analysis/clustering.hpp"
#include "mazescope/error.hpp"

namespace mazescope::analysis {

namespace {

double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> to_doubles(const PixelDataset& ds) { return {ds.values.begin(), ds.values.end()}; }

}  // namespace

KMeansResult kmeans(const PixelDataset& dataset, const KMeansOptions& options, const RunControl& control) {
  const std::size_t n = dataset.size();
  const std::size_t d = dataset.dims();
  const std::size_t k = options.k;
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kParameter, "k must be within [1, " + std::to_string(n) + "], got " + std::to_string(k));
  }
  const std::vector<double> points = to_doubles(dataset);
  auto point = [&](std::size_t i) { return points.data() + i * d; };

  // k-means++ seeding.
  std::mt19937_64 rng(options.seed);
  std::vector<double> centroids(k * d);
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(n));
  first = std::min(first, n - 1);
  std::copy_n(point(first), d, centroids.begin());
  chosen[first] = true;
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(point(i), centroids.data(), d);
  for (std::size_t c = 1; c < k; ++c) {
    control.check();
    double total = 0.0;
    for (double v : nearest) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = unit_draw(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest[i] <= 0.0) continue;
        acc += nearest[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      // every point coincides with a centroid: take the first unused one
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (!chosen[i]) pick = i;
      }
      if (pick == n) pick = 0;
    }
    chosen[pick] = true;
    std::copy_n(point(pick), d, centroids.begin() + static_cast<std::ptrdiff_t>(c * d));
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(point(i), centroids.data() + c * d, d));
    }
  }

  KMeansResult result;
  std::vector<std::size_t> assignment(n, k);
  std::vector<double> dist(n);
  std::vector<std::size_t> sizes(k);
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    control.check();
    // Assignment: nearest centroid, lowest index on ties.
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = squared_distance(point(i), centroids.data() + c * d, d);
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (assignment[i] != best) changed = true;
      assignment[i] = best;
      dist[i] = best_d;
      inertia += best_d;
    }
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;
    control.report(static_cast<double>(iter + 1) / static_cast<double>(options.max_iters));

    const std::size_t h = result.inertia_history.size();
    if (!changed || (h >= 2 && result.inertia_history[h - 2] - inertia < options.tol)) {
      result.converged = true;
    }

    // Update: centroid means; empty clusters take the farthest points.
    std::fill(centroids.begin(), centroids.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      double* c = centroids.data() + assignment[i] * d;
      const double* p = point(i);
      for (std::size_t j = 0; j < d; ++j) c[j] += p[j];
      ++sizes[assignment[i]];
    }
    std::vector<bool> reseeded(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      double* cent = centroids.data() + c * d;
      if (sizes[c] > 0) {
        for (std::size_t j = 0; j < d; ++j) cent[j] /= static_cast<double>(sizes[c]);
        continue;
      }
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (reseeded[i]) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) far = 0;
      reseeded[far] = true;
      std::copy_n(point(far), d, cent);
      result.converged = false;
    }
    if (result.converged) break;
  }

  result.centroids = std::move(centroids);
  Classification& cls = result.classification;
  cls.layer = dataset.layer;
  cls.height = dataset.height;
  cls.width = dataset.width;
  cls.channels = dataset.channels;
  cls.assignment.assign(assignment.begin(), assignment.end());
  for (std::size_t c = 0; c < k; ++c) {
    cls.classes.emplace(static_cast<ClassId>(c), ClassInfo{"class " + std::to_string(c), Rgb{}, false});
  }
  return result;
}

}  // namespace mazescope::analysis
