#pragma once

#include <stdexcept>
#include <string>

namespace s3tori {

// Root of every numerical failure raised by the library. The command-line
// tool maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotUnitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotOrthogonalError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateGeodesicError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularPointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateImmersionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PerturbationTooLargeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AmbiguousCellError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TangentEquatorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PreconditionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotFoundError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SelfIntersectionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonSmoothJoinError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotDiffeomorphismError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotMinimalError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateFunctionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MarginTooSmallError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Malformed input from files or descriptor strings. Maps to exit code 2.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace s3tori
