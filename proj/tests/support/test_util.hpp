#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include "mazescope/error.hpp"

namespace testutil {

/// Code of the mazescope::Error thrown by f, or nullopt if it returned.
template <class F>
std::optional<mazescope::ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const mazescope::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("mazescope-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
