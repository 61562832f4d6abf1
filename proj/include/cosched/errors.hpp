#pragma once

#include <stdexcept>
#include <string>

namespace cosched {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text (bad JSON syntax). Message carries line/column.
struct ParseError : Error {
  using Error::Error;
};

/// Structurally valid input that violates a model invariant.
struct ValidationError : Error {
  using Error::Error;
};

/// An operation was called with arguments outside its domain.
struct DomainError : Error {
  using Error::Error;
};

struct UnknownAcceleratorError : DomainError {
  using DomainError::DomainError;
};

struct SelfNotRunningError : DomainError {
  using DomainError::DomainError;
};

/// A merged layer group ended up with no accelerator able to run it.
struct EmptySupportError : Error {
  using Error::Error;
};

/// Objective requested for a timeline that violates the overlap constraint.
struct InfeasibleTimelineError : Error {
  using Error::Error;
};

/// Every total assignment violates support sets or the overlap constraint.
struct NoFeasibleScheduleError : Error {
  using Error::Error;
};

/// Exhaustive enumeration refused: assignment space above the guard.
struct SpaceTooLargeError : Error {
  using Error::Error;
};

}  // namespace cosched
