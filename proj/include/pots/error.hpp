#pragma once

#include <stdexcept>
#include <string>

namespace pots {

// Base for every input/configuration problem. The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed distribution text or config token.
class SyntaxError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Well-formed value outside its domain (non-positive level, duplicate level, ...).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Population size not divisible by the team size.
class DivisibilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Scalar configuration value out of range.
class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Run results that do not belong to the configuration they are reported against.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pots
