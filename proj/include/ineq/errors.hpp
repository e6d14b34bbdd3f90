#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ineq {

/// Input outside the documented domain of an operation.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Adaptive refinement exhausted its budget before reaching tolerance.
struct NonConvergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A discrete enumeration would exceed the configured size cap.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Side conditions of the selected inequality regime are violated.
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Witness has zero energy but positive p-variance: no finite constant works.
struct DegenerateWitness : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Optimizer saw only zero ratios (flagged defensively; cannot happen for valid inputs).
struct DegenerateInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A probe pair violated the claimed Lipschitz bound.
struct LipschitzViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Not enough nonzero-count points to fit a tail exponent.
struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Expression syntax error, with byte offset and the token set that was expected.
struct ParseError : std::runtime_error {
  std::size_t offset;
  std::string expected;
  ParseError(const std::string& msg, std::size_t off, std::string exp)
      : std::runtime_error(msg + " at byte " + std::to_string(off) +
                           " (expected " + exp + ")"),
        offset(off),
        expected(std::move(exp)) {}
};

/// Variable index outside the declared arity.
struct ArityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ineq
