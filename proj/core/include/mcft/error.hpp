#pragma once

#include <stdexcept>
#include <string>

namespace mcft {

// Caller broke a documented precondition (dimension mismatch, backwards
// prediction, missing similarity model, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input data is structurally invalid (duplicate ids, bad boxes).
class MalformedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A text file could not be parsed. Carries the offending 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Invalid configuration or scenario key/value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The exhaustive oracle refuses instances beyond its guard.
class TooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A state that the construction guarantees cannot happen (cycle in the
// network, unbounded master LP, duplicate priced column).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Positive hinge loss with a zero update direction (anchor informative but
// positive equals negative, or zero anchor).
class DegenerateTriplet : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mcft
