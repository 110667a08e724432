#include "geoprec/errors.hpp"

namespace geoprec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroMatrix: return "ZeroMatrix";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroDiagonalEntry: return "ZeroDiagonalEntry";
    case ErrorCode::kZeroRowOrColumn: return "ZeroRowOrColumn";
    case ErrorCode::kSingularBlock: return "SingularBlock";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kSingularProbeBlock: return "SingularProbeBlock";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kZeroJacobian: return "ZeroJacobian";
    case ErrorCode::kZeroCoordinate: return "ZeroCoordinate";
    case ErrorCode::kExpansionOverflow: return "ExpansionOverflow";
    case ErrorCode::kDegreeViolation: return "DegreeViolation";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsupportedQualifier: return "UnsupportedQualifier";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      index_(index) {}

}  // namespace geoprec
