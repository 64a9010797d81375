#pragma once

#include <stdexcept>
#include <string>

namespace costas {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimensions, non-positive
/// time constants, malformed plans).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is singular, e.g. evaluating a transfer
/// function at an eigenvalue of A.
class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

/// The integrator produced a non-finite state component.
class IntegrationDiverged : public Error {
 public:
  using Error::Error;
};

/// Lock detection was asked to judge a trace shorter than five windows.
class TraceTooShort : public Error {
 public:
  using Error::Error;
};

}  // namespace costas
