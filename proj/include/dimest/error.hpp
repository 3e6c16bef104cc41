#pragma once

#include <stdexcept>
#include <string>

namespace dimest {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text that does not follow the declared file format.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a precondition (N < 2, NaN, bad index, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure; the message carries the system cause.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Box-count curve with no admissible fitting window.
class SaturationError : public Error {
 public:
  using Error::Error;
};

/// Cloud failed the rotational-symmetry check required before flattening.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Nearest-neighbour distances are all zero.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace dimest
