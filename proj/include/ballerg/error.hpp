#pragma once

#include <stdexcept>
#include <string>

namespace ballerg {

enum class ErrorCode {
  InvalidArgument,
  NonConvergence,
  AmbiguousModulus,
  SpectrumOutsideDisk,
  NotUnitModulus,
  DenominatorVanishes,
  OutOfRange,
  NotSelfMap,
  StepUnderflow,
  NotFixedPoint,
  Inconclusive,
  NonRootEigenvalue,
  NotConverging,
  NotEscaping,
  EmptyRegion,
  DegenerateNodes,
  SeparationTooSmall,
  MapContracts,
  SearchExhausted,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

// Every failure in the library surfaces as this exception; `code()` lets
// callers branch on the failure kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ballerg
