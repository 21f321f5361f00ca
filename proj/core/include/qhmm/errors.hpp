#pragma once

#include <stdexcept>
#include <string>

namespace qhmm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of matrices, vectors or alphabets do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation (bad parameter,
/// unknown symbol, non-unitary conjugation, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a result that cannot be trusted (large imaginary
/// residual, underflow, eigensolver failure).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive enumeration would exceed its configured size cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or schema violation.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qhmm
