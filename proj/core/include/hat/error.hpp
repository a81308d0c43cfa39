#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hat {

enum class ErrorCode : std::uint8_t {
  ZeroVector,
  NotPositiveDefinite,
  SolverDiverged,
  DimensionMismatch,
  EmptyQueue,
  EmptySampleSet,
  InsufficientClasses,
  InsufficientSamples,
  InvalidCost,
  Config,
  FrameOrder,
  Parse,
  Format,
  Truncation,
  Data,
  Alignment,
  Io,
  DuplicateKey,
  InvalidArgument,
};

/// Stable upper-case token used in CLI error lines, e.g. "NOT_POSITIVE_DEFINITE".
std::string_view error_code_name(ErrorCode code) noexcept;

/// True for failures of the numerical solvers (as opposed to bad input).
bool is_solver_error(ErrorCode code) noexcept;

/// Every module reports failures through this exception. `index` carries the
/// offending pivot, line number, or value index where one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace hat
