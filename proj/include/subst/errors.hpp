#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace subst {

// Base class for every error the library raises.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An expression does not type-check (operand of the wrong sort).
struct SortError : Error {
  using Error::Error;
};

// An expression references a name that is neither a declared variable nor a
// bound parameter.
struct UnboundVariableError : Error {
  using Error::Error;
};

// Machine structure is malformed: duplicate names, dangling references,
// overlapping system variable sets, conflicting assignments, and the like.
struct ValidationError : Error {
  using Error::Error;
};

// A computed value escaped its declared domain (a nat above its bound).
struct DomainError : Error {
  using Error::Error;
};

struct InitViolatesInvariantError : Error {
  using Error::Error;
};

struct GuardFalseError : Error {
  using Error::Error;
};

struct UnknownEventError : Error {
  using Error::Error;
};

struct GluingIllSortedError : Error {
  using Error::Error;
};

// Exploration hit the state cap before reaching a fixpoint. Never a pass.
struct StateCapExceededError : Error {
  StateCapExceededError(uint64_t cap_, uint64_t frontier_)
      : Error("state cap exceeded: cap=" + std::to_string(cap_) +
              ", frontier=" + std::to_string(frontier_)),
        cap(cap_),
        frontier(frontier_) {}

  uint64_t cap;
  uint64_t frontier;
};

// No candidate valuation satisfies the recovery constraints.
struct UnrecoverableError : Error {
  using Error::Error;
};

struct WrongActiveSystemError : Error {
  using Error::Error;
};

struct MaxStepsExceededError : Error {
  using Error::Error;
};

// Malformed machine-definition file.
struct ParseError : Error {
  using Error::Error;
};

// Bad command-line or run configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace subst
