#pragma once

#include <stdexcept>
#include <string>

namespace ecc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AllZeroMatrix : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct OutOfRangeAssignment : Error { using Error::Error; };
struct EmptyRow : Error { using Error::Error; };
struct EmptyColumn : Error { using Error::Error; };
struct InvalidClusterCount : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct DimensionHeaderMismatch : ParseError { using ParseError::ParseError; };
struct CountTooLarge : Error { using Error::Error; };
struct MissingLabels : Error { using Error::Error; };

}  // namespace ecc
