#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qet {

enum class ErrorCode {
  NonConvergence,
  SingularKernel,
  SupportViolation,
  GeometryViolation,
  DegenerateProfile,
  RouteMismatch,
  ParameterViolation,
  CoincidentPoints,
  KnotEvaluation,
  DivergentCost,
  NonFiniteFunctional,
  SolverFailure,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Validation failures map to CLI exit status 1, numerical failures to 2.
bool is_numerical_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace qet
