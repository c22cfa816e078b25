#pragma once

#include <stdexcept>
#include <string>

namespace guesr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

// Non-finite loss during training; message carries epoch/batch coordinates.
struct DivergenceError : NumericError {
    using NumericError::NumericError;
};

}  // namespace guesr
