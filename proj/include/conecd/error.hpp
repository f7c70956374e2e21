#pragma once

#include <stdexcept>
#include <string>

namespace conecd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (negative radius,
/// interpolation fraction outside [0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input violates a structural invariant (symmetry, triangle inequality, marginals).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the offending line or field.
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace conecd
