#pragma once

#include <stdexcept>
#include <string>

namespace foodchain {

/// Input outside the domain of an operation (negative density, bad parameter,
/// malformed configuration). The CLI maps these to exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A value that the operation cannot produce, e.g. inverting a response at or
/// above its asymptote.
class NoSolutionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Precondition of an operation violated by the caller (e.g. a point that is
/// not an equilibrium handed to an equilibrium-only routine).
class PreconditionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Failure of a numerical procedure on valid input. Exit code 3 in the CLI.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StiffnessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotFoundError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RecurrenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoCycleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace foodchain
