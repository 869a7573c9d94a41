#pragma once

#include <stdexcept>
#include <string>

namespace structsvm {

enum class ErrorCode {
  DegenerateSegment,
  DuplicateLabel,
  NonFiniteLoss,
  ZeroGradient,
  DomainError,
  InvalidParams,
  EmptyTruth,
  UnsupportedBackend,
  Exhausted,
  InconsistentQuery,
  NonPositiveLambda,
  UnsupportedDAG,
  NotATree,
  InvalidLabel,
  InvalidNode,
  LengthMismatch,
  InferenceFailure,
  InfeasibleStructure,
  Io,
  Parse,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace structsvm
