#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "mazescope/analysis/clustering.hpp"
#include "mazescope/error.hpp"

namespace mazescope::analysis {

namespace {

/// Upper-triangular distance storage for slot pairs i < j.
class CondensedMatrix {
 public:
  explicit CondensedMatrix(std::size_t n) : n_(n), data_(n * (n - 1) / 2) {}
  double& operator()(std::size_t i, std::size_t j) { return data_[offset(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[offset(i, j)]; }

 private:
  std::size_t offset(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }
  std::size_t n_;
  std::vector<double> data_;
};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

AgglomerativeResult agglomerative(const PixelDataset& dataset, const AgglomerativeOptions& options,
                                  const RunControl& control) {
  const std::size_t n = dataset.size();
  if (n < 1) throw Error(ErrorCode::kParameter, "agglomerative clustering needs at least one point");
  if (!options.threshold && !options.count) {
    throw Error(ErrorCode::kParameter, "agglomerative clustering needs a distance threshold or a cluster count");
  }
  if (options.threshold && !(*options.threshold >= 0.0)) {
    throw Error(ErrorCode::kParameter, "distance threshold must be non-negative");
  }
  if (options.count && (*options.count < 1 || *options.count > n)) {
    throw Error(ErrorCode::kParameter, "cluster count must be within [1, " + std::to_string(n) + "]");
  }
  const std::size_t target = options.count.value_or(1);
  const std::size_t d = dataset.dims();

  AgglomerativeResult result;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});

  if (n > 1 && n > target) {
    CondensedMatrix dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) control.check();
      const auto pi = dataset.point(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto pj = dataset.point(j);
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double diff = static_cast<double>(pi[c]) - pj[c];
          s += diff * diff;
        }
        dist(i, j) = std::sqrt(s);
      }
    }

    std::vector<bool> active(n, true);
    std::vector<std::size_t> size(n, 1);
    std::vector<std::size_t> nn(n, kNone);
    std::vector<double> nnd(n, std::numeric_limits<double>::infinity());
    auto rescan = [&](std::size_t i) {
      nn[i] = kNone;
      nnd[i] = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !active[j]) continue;
        const double v = dist(i, j);
        if (v < nnd[i]) {
          nnd[i] = v;
          nn[i] = j;
        }
      }
    };
    for (std::size_t i = 0; i < n; ++i) rescan(i);

    std::size_t clusters = n;
    while (clusters > target) {
      if (result.merges.size() % 32 == 0) control.check();
      std::size_t best = kNone;
      auto key = [&](std::size_t i) {
        return std::make_tuple(nnd[i], std::min(i, nn[i]), std::max(i, nn[i]));
      };
      for (std::size_t i = 0; i < n; ++i) {
        if (!active[i] || nn[i] == kNone) continue;
        if (best == kNone || key(i) < key(best)) best = i;
      }
      if (best == kNone) break;
      const auto [gap, a, b] = key(best);
      if (options.threshold && !(gap < *options.threshold)) break;

      const double sa = static_cast<double>(size[a]);
      const double sb = static_cast<double>(size[b]);
      for (std::size_t k = 0; k < n; ++k) {
        if (!active[k] || k == a || k == b) continue;
        dist(a, k) = (sa * dist(a, k) + sb * dist(b, k)) / (sa + sb);
      }
      active[b] = false;
      size[a] += size[b];
      parent[b] = a;
      --clusters;
      result.merges.push_back(Merge{a, b, gap, size[a]});

      rescan(a);
      for (std::size_t k = 0; k < n; ++k) {
        if (!active[k] || k == a) continue;
        if (nn[k] == a || nn[k] == b) {
          rescan(k);
        } else {
          const double v = dist(k, a);
          if (v < nnd[k] || (v == nnd[k] && a < nn[k])) {
            nnd[k] = v;
            nn[k] = a;
          }
        }
      }
      control.report(static_cast<double>(n - clusters) / static_cast<double>(n - target));
    }
  }

  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = i;
    while (parent[r] != r) r = parent[r];
    labels[i] = r;
  }
  result.classification = classify(dataset, labels);
  return result;
}

}  // namespace mazescope::analysis
