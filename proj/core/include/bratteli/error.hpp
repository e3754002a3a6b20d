#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bratteli {

enum class ErrorCode {
  malformed_diagram,
  invalid_argument,
  level_out_of_range,
  maximal_path,
  minimal_path,
  missing_pairing,
  presentation_mismatch,
  invalid_system,
  intertwining_invalid,
  unstabilized,
  needs_depth,
  pairing_failed,
  count_mismatch,
  refinement_invalid,
  overflow,
  parse_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bratteli
