#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyerslab {

enum class ErrorCode {
  ContextMismatch,
  DegreeOverflow,
  IdentityViolation,
  InvalidElement,
  ArityMismatch,
  Divergent,
  TailNotCertifiable,
  InvalidRegime,
  InvalidParams,
  CapExceeded,
  NotCertified,
  EvaluationFailure,
  PreconditionViolated,
  ScalingHypothesisViolated,
  InapplicableHypothesis,
  SingularS,
  DenominatorDegenerate,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code tells callers what broke.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hyerslab
