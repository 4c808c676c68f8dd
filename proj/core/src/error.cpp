#include "mazescope/error.hpp"

namespace mazescope {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kConfiguration: return "configuration_error";
    case ErrorCode::kRange: return "range_error";
    case ErrorCode::kFormat: return "format_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kParameter: return "parameter_error";
    case ErrorCode::kPlacement: return "placement_error";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kCancelled: return "cancelled";
  }
  return "unknown";
}

}  // namespace mazescope
