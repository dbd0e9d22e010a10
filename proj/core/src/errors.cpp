#include "srmkit/errors.hpp"

namespace srmkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidMatrix: return "InvalidMatrix";
    case ErrorCode::kDegenerateColumn: return "DegenerateColumn";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::kRsmMismatch: return "RsmMismatch";
    case ErrorCode::kExampleCountMismatch: return "ExampleCountMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kNetworkCountMismatch: return "NetworkCountMismatch";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kConfigParse: return "ConfigParse";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kNonNumericCell: return "NonNumericCell";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kDuplicateEntry: return "DuplicateEntry";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateColumn:
    case ErrorCode::kZeroVariance:
    case ErrorCode::kDegenerateSpectrum:
    case ErrorCode::kRsmMismatch:
    case ErrorCode::kIo:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

DegenerateColumnError::DegenerateColumnError(std::size_t column,
                                             const std::string& context)
    : Error(ErrorCode::kDegenerateColumn,
            (context.empty() ? std::string() : context + ": ") + "column " +
                std::to_string(column) + " has no spread to normalize"),
      column_(column) {}

}  // namespace srmkit
