#pragma once

#include <stdexcept>
#include <string>

namespace lingram {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An enumeration or comparison was asked to exceed its configured budget.
struct ResourceLimitError : Error {
  using Error::Error;
};

// A residual comparison/emptiness check whose truncation budget is below the
// configured minimum; the answer would be meaningless, so we refuse.
struct BudgetTooSmallError : Error {
  using Error::Error;
};

// A grammar file or in-memory tree violates a structural invariant.
struct MalformedTreeError : Error {
  using Error::Error;
};

// Text input (word, grammar file, ...) that does not parse.
struct TextParseError : Error {
  TextParseError(const std::string& what, int line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_no(line) {}
  int line_no;
};

// Rational-function arithmetic: denominator became identically zero.
struct DivisionByZeroError : Error {
  using Error::Error;
};

// Linear system has no unique solution (should not happen for trees the
// discoverer emits; loaded files can provoke it).
struct SingularSystemError : Error {
  using Error::Error;
};

// Series expansion requested at a pole: denominator vanishes at x = 0.
struct PoleAtZeroError : Error {
  using Error::Error;
};

// Bracket expansion failed to close into fundamental brackets within limits.
struct ClosureFailureError : Error {
  using Error::Error;
};

// A context word on the assumed-bad side of a clone direction contains a
// mishap on its own, so every middle is bad there; the direction must be
// handled as an emptiness claim on the other side instead of by straddling
// case analysis.
struct InherentContextMishapError : Error {
  using Error::Error;
};

}  // namespace lingram
