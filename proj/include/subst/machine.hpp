#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subst/expr.hpp"
#include "subst/value.hpp"

namespace subst {

// A declared state variable. Nat variables carry an inclusive bound so their
// domain stays finite and enumerable; Set variables range over subsets of the
// universe; Atom is not a legal variable kind.
struct VarDecl {
  std::string name;
  Kind kind = Kind::Set;
  uint64_t nat_bound = 0;
};

// A total assignment of values to a machine's variables, indexed by
// declaration order.
struct Valuation {
  std::vector<Value> slots;

  bool operator==(const Valuation&) const = default;
};

// Canonical strict order on same-layout valuations: variables in declaration
// order, values by value_less.
bool valuation_less(const Valuation& a, const Valuation& b);

struct ValuationHash {
  size_t operator()(const Valuation& v) const;
};

struct ParamDecl {
  std::string name;
  ParamDomain domain;
};

struct Assignment {
  uint32_t var = 0;  // target variable index
  ExprPtr rhs;
};

// One guarded event: enabled when the guard holds under some binding of its
// parameters; firing applies all assignments in parallel (right-hand sides
// evaluated in the pre-state). Convergent events must strictly decrease their
// system's variant.
struct GuardedEvent {
  std::string name;
  std::vector<ParamDecl> params;
  ExprPtr guard;
  std::vector<Assignment> assigns;
  bool convergent = false;
};

// A system inside a machine: a group of variables plus a variant expression
// of sort nat over those variables only.
struct SystemDef {
  std::string id;
  std::vector<uint32_t> vars;  // ascending variable indices
  ExprPtr variant;
};

struct Machine {
  std::string name;
  Universe universe;
  std::vector<VarDecl> vars;
  Valuation init;
  std::vector<ExprPtr> invariants;
  ExprPtr variant;     // optional machine-level variant
  ExprPtr checkpoint;  // optional checkpoint predicate; absent means every state
  std::vector<GuardedEvent> events;
  std::vector<SystemDef> systems;  // pairwise-disjoint variable groups

  std::optional<uint32_t> var_index(std::string_view name) const;
  std::optional<uint32_t> event_index(std::string_view name) const;
  std::optional<uint32_t> system_index(std::string_view id) const;
  const SystemDef& require_system(std::string_view id) const;

  // Sort environment of the machine's state variables.
  SortEnv var_sorts() const;
};

// Structural well-formedness: unique names, sorts check out, assignments
// target distinct declared variables, system variable groups are disjoint and
// their variants mention only their own variables, every convergent event has
// a variant to decrease. Throws ValidationError / SortError /
// UnboundVariableError. Does not check the init state against the invariants;
// initialize() does that.
void validate(const Machine& m);

// State variables read or written by the event (parameters excluded).
std::vector<uint32_t> event_footprint(const Machine& m, const GuardedEvent& e);

// Which system each event belongs to, by variable footprint: index into
// m.systems, or nullopt for events touching no system's variables. An event
// whose footprint spans two systems is rejected.
std::vector<std::optional<uint32_t>> attribute_events(const Machine& m);

std::string valuation_to_string(const Machine& m, const Valuation& v);

}  // namespace subst
