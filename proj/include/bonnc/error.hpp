#pragma once

#include <stdexcept>
#include <string>

namespace bonnc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct ArgumentError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace bonnc
