#pragma once

#include <stdexcept>
#include <string>

namespace dts {

// Base for every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension disagreement between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A typed invariant (unit-norm atoms, nonnegative SRF weights, ...) does not hold.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// File system or format problem. Messages always name the file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Iterative solver produced non-finite values or blew up.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dts
