#pragma once

#include <stdexcept>
#include <string>

namespace ruzsa {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Element outside its carrier, mismatched groups, unsupported group kind.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A value violates a type invariant (normalization, negative mass, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inputs are well formed but do not meet an operation's hypotheses
// (e.g. a Markov chain that is not Markov, a density that is not log-concave).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A grid computation would exceed the configured cell budget.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Malformed file or JSON document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ruzsa
