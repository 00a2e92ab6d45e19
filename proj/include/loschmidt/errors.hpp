#pragma once

#include <stdexcept>
#include <string>

namespace loschmidt {

// Parameter or precondition violation supplied by the caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A state was handed to a transform expecting the other representation.
class RepresentationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Dense operations requested above the configured matrix size.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Numerical failure (eigensolver, fit, root search) with a readable reason.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoRootError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace loschmidt
