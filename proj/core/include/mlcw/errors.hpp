#pragma once

#include <stdexcept>
#include <string>

namespace mlcw {

/// A weight (or other input) lies outside the domain an operation accepts,
/// e.g. a half word whose exponent MSB is already in use.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A value cannot be represented in the target range (half overflow, bad bit
/// position).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Malformed file or text input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training stopped at its iteration cap below the minimum accuracy.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlcw
