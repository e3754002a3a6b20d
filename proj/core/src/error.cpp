#include "bratteli/error.hpp"

namespace bratteli {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_diagram: return "malformed_diagram";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::level_out_of_range: return "level_out_of_range";
    case ErrorCode::maximal_path: return "maximal_path";
    case ErrorCode::minimal_path: return "minimal_path";
    case ErrorCode::missing_pairing: return "missing_pairing";
    case ErrorCode::presentation_mismatch: return "presentation_mismatch";
    case ErrorCode::invalid_system: return "invalid_system";
    case ErrorCode::intertwining_invalid: return "intertwining_invalid";
    case ErrorCode::unstabilized: return "unstabilized";
    case ErrorCode::needs_depth: return "needs_depth";
    case ErrorCode::pairing_failed: return "pairing_failed";
    case ErrorCode::count_mismatch: return "count_mismatch";
    case ErrorCode::refinement_invalid: return "refinement_invalid";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::parse_error: return "parse_error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace bratteli
