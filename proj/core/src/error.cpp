#include "hat/error.hpp"

namespace hat {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZERO_VECTOR";
    case ErrorCode::NotPositiveDefinite: return "NOT_POSITIVE_DEFINITE";
    case ErrorCode::SolverDiverged: return "SOLVER_DIVERGED";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::EmptyQueue: return "EMPTY_QUEUE";
    case ErrorCode::EmptySampleSet: return "EMPTY_SAMPLE_SET";
    case ErrorCode::InsufficientClasses: return "INSUFFICIENT_CLASSES";
    case ErrorCode::InsufficientSamples: return "INSUFFICIENT_SAMPLES";
    case ErrorCode::InvalidCost: return "INVALID_COST";
    case ErrorCode::Config: return "CONFIG";
    case ErrorCode::FrameOrder: return "FRAME_ORDER";
    case ErrorCode::Parse: return "PARSE";
    case ErrorCode::Format: return "FORMAT";
    case ErrorCode::Truncation: return "TRUNCATION";
    case ErrorCode::Data: return "DATA";
    case ErrorCode::Alignment: return "ALIGNMENT";
    case ErrorCode::Io: return "IO";
    case ErrorCode::DuplicateKey: return "DUPLICATE_KEY";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

bool is_solver_error(ErrorCode code) noexcept {
  return code == ErrorCode::NotPositiveDefinite || code == ErrorCode::SolverDiverged;
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> index)
    : std::runtime_error(message), code_(code), index_(index) {}

}  // namespace hat
