// Error taxonomy shared across the library. The CLI maps these onto exit
// codes: InvalidParameter -> 2 (config error), ParseError -> 3,
// NumericError and subclasses -> 4.
#pragma once

#include <stdexcept>
#include <string>

namespace tvfrft {

// Misuse of an operation: bad dimensions, out-of-range orders, invalid config.
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An operator outside the supported class (non-normal matrices).
struct UnsupportedOperator : InvalidParameter {
  using InvalidParameter::InvalidParameter;
};

// Data-dependent failure during computation (NaN/Inf, degenerate input).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input data that is syntactically fine but semantically unusable
// (all-zero reference signal, non-finite entries).
struct InvalidInput : NumericError {
  using NumericError::NumericError;
};

// Malformed file contents; the message carries row/column context.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tvfrft
