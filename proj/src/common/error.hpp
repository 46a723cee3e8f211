#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace misengine {

// Numeric values are part of the C ABI (see include/misengine/misengine.h).
enum class ErrorCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kMissingColumn = 3,
  kMalformedRow = 4,
  kDuplicateRecordId = 5,
  kSchemaMismatch = 6,
  kBoxOutOfBounds = 7,
  kVersionMismatch = 8,
  kSpanOutOfRange = 9,
  kUnknownRoleLabel = 10,
  kMissingTaxonomy = 11,
  kInsufficientCandidates = 12,
  kEmptyInput = 13,
  kMissingPrediction = 14,
  kUnknownSampleId = 15,
  kMalformedPrediction = 16,
  kRatioInfeasible = 17,
  kInvalidArgument = 18,
  kInvariantViolation = 19,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // 1-based source line for row/record level errors.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace misengine
