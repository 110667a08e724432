#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geoprec {

enum class ErrorCode {
  kZeroMatrix,
  kDimensionMismatch,
  kZeroDiagonalEntry,
  kZeroRowOrColumn,
  kSingularBlock,
  kRankDeficient,
  kNotConverged,
  kSingularProbeBlock,
  kInsufficientData,
  kZeroJacobian,
  kZeroCoordinate,
  kExpansionOverflow,
  kDegreeViolation,
  kParseError,
  kUnsupportedQualifier,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library. `index` carries the offending
// row/column/probe/line when the error has one.
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

}  // namespace geoprec
