#include "hyerslab/error.hpp"

namespace hyerslab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::IdentityViolation: return "IdentityViolation";
    case ErrorCode::InvalidElement: return "InvalidElement";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::Divergent: return "Divergent";
    case ErrorCode::TailNotCertifiable: return "TailNotCertifiable";
    case ErrorCode::InvalidRegime: return "InvalidRegime";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ScalingHypothesisViolated: return "ScalingHypothesisViolated";
    case ErrorCode::InapplicableHypothesis: return "InapplicableHypothesis";
    case ErrorCode::SingularS: return "SingularS";
    case ErrorCode::DenominatorDegenerate: return "DenominatorDegenerate";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace hyerslab
