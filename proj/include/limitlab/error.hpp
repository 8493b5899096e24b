#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace limitlab {

enum class ErrorCode {
  InvalidInput,
  NotLoxodromic,
  ConstructionFailed,
  CirclesOverlap,
  DepthExceeded,
  ToleranceCollision,
  UnknownCharacter,
  InsufficientData,
  EmptyCloud,
  ReductionStalled,
  NotNormalSpec,
  WitnessTrivial,
  PreconditionFailed,
  InvalidLength,
  NotApplicable,
  SideAmbiguous,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library; `code()` names the
/// failure mode so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace limitlab
