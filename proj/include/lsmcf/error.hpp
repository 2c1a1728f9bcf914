#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lsmcf {

enum class ErrorCode {
  DimensionUnsupported,
  AnisotropicSpacing,
  ResolutionTooSmall,
  BoundaryIndex,
  OutOfDomain,
  SpecGridDimMismatch,
  InvalidSpec,
  UnresolvableGap,
  DegenerateGradient,
  CFLViolation,
  NonFiniteValue,
  PreorderViolated,
  FrontDrift,
  NoInterior,
  NearCriticalPoint,
  InvalidK,
  Unclassifiable,
  EmptyLevelSet,
  DegenerateMoments,
  EmptyMesh,
  MultipleComponents,
  ConfigInvalid,
  SuiteUnknown,
  IoError,
  FormatError,
};

std::string_view to_string(ErrorCode code);

// Process exit status for a failure with this code (see README).
int exit_code(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lsmcf
