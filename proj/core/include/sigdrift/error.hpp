#pragma once

#include <stdexcept>
#include <string>

namespace sigdrift {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (CSV, JSON, config).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A value violates a documented type invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Zero-variance series where a shape (std, PCC) is required.
class ConstantSeriesError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

// Series, grids or windows that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sigdrift
