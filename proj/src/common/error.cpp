#include "common/error.hpp"

namespace misengine {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kUsage: return "Usage";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kDuplicateRecordId: return "DuplicateRecordId";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kBoxOutOfBounds: return "BoxOutOfBounds";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kSpanOutOfRange: return "SpanOutOfRange";
    case ErrorCode::kUnknownRoleLabel: return "UnknownRoleLabel";
    case ErrorCode::kMissingTaxonomy: return "MissingTaxonomy";
    case ErrorCode::kInsufficientCandidates: return "InsufficientCandidates";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMissingPrediction: return "MissingPrediction";
    case ErrorCode::kUnknownSampleId: return "UnknownSampleId";
    case ErrorCode::kMalformedPrediction: return "MalformedPrediction";
    case ErrorCode::kRatioInfeasible: return "RatioInfeasible";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
  std::string out(error_code_name(code));
  if (line) {
    out += " (line " + std::to_string(*line) + ")";
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace misengine
