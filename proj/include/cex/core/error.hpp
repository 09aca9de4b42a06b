#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cex {

enum class ErrorCode {
  SyntaxError,
  UnknownIdentifier,
  UnknownVariable,
  ValueOutOfRange,
  RangeViolation,
  NestedIntervention,
  MissingEquation,
  DuplicateEquation,
  CyclicModel,
  OutOfRangeEquationOutput,
  ScaleExceeded,
  ProbSumError,
  WeightSumNotOne,
  ZeroProbabilityCondition,
  EmptyRestriction,
  EmptyCandidate,
  NotDepthTwo,
  InvalidArgument,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// Byte region of the source text an error refers to (1-based line/column).
struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

class CexError : public std::runtime_error {
public:
  CexError(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  CexError(ErrorCode code, std::string message, SourceSpan span)
      : std::runtime_error(std::move(message)), code_(code), span_(span) {}

  ErrorCode code() const { return code_; }
  const std::optional<SourceSpan>& span() const { return span_; }

private:
  ErrorCode code_;
  std::optional<SourceSpan> span_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string message) {
  throw CexError(code, std::move(message));
}

[[noreturn]] inline void fail(ErrorCode code, std::string message, SourceSpan span) {
  throw CexError(code, std::move(message), span);
}

}  // namespace cex
