#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radctl {

enum class ErrorCode {
  // corpus
  MissingFindings,
  UnknownRegion,
  DuplicateSentenceIndex,
  ReportMismatch,
  // longitudinal
  NoFrontalScan,
  DuplicateTimestamp,
  MissingTokens,
  MixedPatients,
  // anatomy graph
  EmptyPartition,
  // fusion
  ShapeMismatch,
  InvalidParams,
  PositionOverflow,
  GeneratorFailure,
  // metrics
  LengthMismatch,
  VocabularyMismatch,
  LabelerFailure,
  // io / cli
  ParseError,
  IoError,
  InvalidSpec,
  InvalidConfig,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All recoverable failures in the library are reported through this type.
/// `code()` identifies the failure class; `what()` carries the context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace radctl
