#pragma once

#include <stdexcept>
#include <string>

namespace refsob {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where a quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A sampled limit test could not decide (grid too short, fit too poor).
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ProjectorError : public Error {
 public:
  using Error::Error;
};

/// A polynomial root sits on (or numerically next to) the real axis.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class SchemeOrderError : public Error {
 public:
  using Error::Error;
};

/// An operation was asked to run on inputs that fail its gate
/// (e.g. a bounds probe on a non-parabolic problem).
class FailedPrecondition : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace refsob
