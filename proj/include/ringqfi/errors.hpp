#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ringqfi {

// Thrown when an input violates a documented domain (negative loss, eta > 1, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The lumped ring model has no finite value at this (r, a, phi).
class SingularConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The measured quantity carries no information about the parameter.
class NonIdentifiable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bracketed solve found no sign change or the model is not monotone on it.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A checked model invariant failed on computed output.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace ringqfi
