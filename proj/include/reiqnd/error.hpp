#pragma once

#include <stdexcept>
#include <string>

namespace reiqnd {

/// Root of the library's exception hierarchy. Each category maps to one CLI
/// exit code (see exit_code()).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A physical input or configuration value violates its invariant.
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// An analytic approximation was asked for outside the regime it holds in.
class RegimeViolation : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

/// A computed quantity broke an invariant it must satisfy (positivity,
/// unimodality, ...).
class NumericalIntegrity : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

inline int exit_code(const Error& e) {
  if (dynamic_cast<const InvalidInput*>(&e)) return 2;
  if (dynamic_cast<const NumericalIntegrity*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 1;
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace reiqnd
