#include "qet/errors.hpp"

namespace qet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularKernel: return "SingularKernel";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::GeometryViolation: return "GeometryViolation";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::RouteMismatch: return "RouteMismatch";
    case ErrorCode::ParameterViolation: return "ParameterViolation";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::KnotEvaluation: return "KnotEvaluation";
    case ErrorCode::DivergentCost: return "DivergentCost";
    case ErrorCode::NonFiniteFunctional: return "NonFiniteFunctional";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool is_numerical_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonConvergence:
    case ErrorCode::SingularKernel:
    case ErrorCode::RouteMismatch:
    case ErrorCode::DivergentCost:
    case ErrorCode::NonFiniteFunctional:
    case ErrorCode::SolverFailure:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace qet
