#include "structsvm/error.hpp"

namespace structsvm {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateSegment: return "DegenerateSegment";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::EmptyTruth: return "EmptyTruth";
    case ErrorCode::UnsupportedBackend: return "UnsupportedBackend";
    case ErrorCode::Exhausted: return "Exhausted";
    case ErrorCode::InconsistentQuery: return "InconsistentQuery";
    case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorCode::UnsupportedDAG: return "UnsupportedDAG";
    case ErrorCode::NotATree: return "NotATree";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InferenceFailure: return "InferenceFailure";
    case ErrorCode::InfeasibleStructure: return "InfeasibleStructure";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace structsvm
