#include "radctl/error.hpp"

namespace radctl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFindings: return "MissingFindings";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::DuplicateSentenceIndex: return "DuplicateSentenceIndex";
    case ErrorCode::ReportMismatch: return "ReportMismatch";
    case ErrorCode::NoFrontalScan: return "NoFrontalScan";
    case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorCode::MissingTokens: return "MissingTokens";
    case ErrorCode::MixedPatients: return "MixedPatients";
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::PositionOverflow: return "PositionOverflow";
    case ErrorCode::GeneratorFailure: return "GeneratorFailure";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::VocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::LabelerFailure: return "LabelerFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace radctl
