#pragma once

#include <stdexcept>
#include <string>

namespace bsm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File missing, unreadable, or unwritable.
struct IoError : Error {
    using Error::Error;
};

// Corrupt header or truncated payload in an image/disparity/pattern file.
struct FormatError : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

// Inputs that must agree in size (image dimensions, bit lengths) do not.
struct DimensionMismatch : Error {
    using Error::Error;
};

// Evaluation region contains no counted pixels.
struct EmptyRegion : Error {
    using Error::Error;
};

}  // namespace bsm
