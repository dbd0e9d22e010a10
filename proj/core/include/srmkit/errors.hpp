#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace srmkit {

enum class ErrorCode {
  // matrix / numerics
  kInvalidMatrix,
  kDegenerateColumn,
  kZeroVariance,
  kLengthMismatch,
  kEmptyInput,
  kDegenerateSpectrum,
  kRsmMismatch,
  // shapes and counts
  kExampleCountMismatch,
  kDimensionMismatch,
  kSizeMismatch,
  kEmptyList,
  kKTooLarge,
  kNetworkCountMismatch,
  // configuration
  kInvalidSpec,
  kConfigParse,
  // files
  kBadMagic,
  kTruncatedPayload,
  kNonNumericCell,
  kDimMismatch,
  kMissingFile,
  kDuplicateEntry,
  kIo,
};

std::string_view to_string(ErrorCode code);

// True for errors caused by bad user input (flags, files, shapes) as opposed
// to numerical failures on well-formed input. The CLI maps the former to exit
// code 1 and the latter to exit code 2.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A column whose normalization is undefined (zero norm, or zero variance under
// Pearson centering).
class DegenerateColumnError : public Error {
 public:
  DegenerateColumnError(std::size_t column, const std::string& context);

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

}  // namespace srmkit
