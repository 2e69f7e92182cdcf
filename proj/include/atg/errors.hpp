#pragma once

#include <stdexcept>
#include <string>

namespace atg {

enum class ErrorCode {
  NotDerived,
  StepOutOfRange,
  IncompletePlacement,
  InvalidZone,
  UnknownNodeId,
  GoalUnrepresentable,
  NoDeploymentVariables,
  EnumerationLimitExceeded,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotDerived: return "NotDerived";
    case ErrorCode::StepOutOfRange: return "StepOutOfRange";
    case ErrorCode::IncompletePlacement: return "IncompletePlacement";
    case ErrorCode::InvalidZone: return "InvalidZone";
    case ErrorCode::UnknownNodeId: return "UnknownNodeId";
    case ErrorCode::GoalUnrepresentable: return "GoalUnrepresentable";
    case ErrorCode::NoDeploymentVariables: return "NoDeploymentVariables";
    case ErrorCode::EnumerationLimitExceeded: return "EnumerationLimitExceeded";
  }
  return "UnknownError";
}

// Engine-level failure: a violated operation contract, not a scenario-file
// problem (those are reported as Diagnostics by the parser/validator).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace atg
