#pragma once

#include <stdexcept>
#include <string>

namespace smate {

/// Caller violated an operation's precondition (field mismatch, bad argument).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mathematically undefined request, e.g. inverting zero.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A coding scheme cannot be built with the requested parameters.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FieldTooSmallError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smate
