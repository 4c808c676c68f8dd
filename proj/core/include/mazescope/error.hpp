#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mazescope {

/// Machine-readable category attached to every error raised by the core.
enum class ErrorCode {
  kConfiguration,  // shapes or structural parameters disagree
  kRange,          // index outside its valid domain
  kFormat,         // malformed or version-mismatched file/payload
  kIo,             // file missing, unreadable or truncated
  kNotFound,       // unknown id or name
  kParameter,      // invalid argument value
  kPlacement,      // entity placed on a blocked cell
  kConflict,       // stale write
  kCancelled,      // cooperative cancellation observed
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string details = {})
      : std::runtime_error(std::move(message)), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::string details_;
};

}  // namespace mazescope
