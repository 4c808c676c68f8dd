#pragma once

#include <functional>
#include <stop_token>

#include "mazescope/error.hpp"

namespace mazescope::analysis {

/// Cooperative cancellation and progress reporting for long-running analyses.
struct RunControl {
  std::stop_token stop;
  std::function<void(double)> progress;

  void check() const {
    if (stop.stop_requested()) throw Error(ErrorCode::kCancelled, "run cancelled");
  }
  void report(double fraction) const {
    if (progress) progress(fraction);
  }
};

}  // namespace mazescope::analysis
