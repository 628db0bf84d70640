#pragma once

#include <stdexcept>
#include <string>

namespace tasksheaf {

// Base for everything thrown on purpose. Catch this at tool boundaries.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed textual input (rationals, JSON documents, CLI value lists).
struct ParseError : Error {
  using Error::Error;
};

// Structurally well-formed input that violates a model invariant
// (dead-end adversary state, duplicate task input, arity mismatch ...).
struct ValidationError : Error {
  using Error::Error;
};

// Disagreement between component arities (adversary n vs task n vs input width).
struct ArityError : ValidationError {
  using ValidationError::ValidationError;
};

// A "cannot happen" condition. Reaching one is a bug here, not bad input.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace tasksheaf
