#pragma once

#include <stdexcept>
#include <string>

namespace foresight {

/// Raised when an input violates a documented precondition. The message
/// starts with the offending field when one can be named.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system or parse failures while reading or writing artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace foresight
