#pragma once

#include <stdexcept>

namespace embedclust {

// Base type for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor/vector shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument or configuration failed.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; messages carry a 1-based line number where known.
class ParseError : public Error {
 public:
  using Error::Error;
};

// File system problem (missing file, unwritable directory).
class IoError : public Error {
 public:
  using Error::Error;
};

// An iterative method exhausted its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A non-finite value appeared where a finite one is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A pair-sampling request that the dataset cannot satisfy.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace embedclust
