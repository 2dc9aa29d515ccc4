#pragma once

#include "subst/eval.hpp"
#include "subst/machine.hpp"

namespace subst {

// Parameter values for one event occurrence, in parameter declaration order.
using Binding = std::vector<Value>;

struct EnabledEvent {
  uint32_t event = 0;  // index into m.events
  Binding binding;

  bool operator==(const EnabledEvent&) const = default;
};

// Initial state of the machine. Throws InitViolatesInvariantError if the
// declared init state breaks an invariant.
Valuation initialize(const Machine& m);

// All bindings of the event's parameters, in lexicographic order of the
// per-parameter domain enumerations. A parameterless event has the single
// empty binding.
std::vector<Binding> event_bindings(const Machine& m, const GuardedEvent& e);

bool guard_holds(const Machine& m, const Valuation& v, const GuardedEvent& e,
                 const Binding& b);

// Enabled event occurrences in canonical order: events in declaration order,
// bindings in event_bindings order.
std::vector<EnabledEvent> enabled(const Machine& m, const Valuation& v);

// Fire one event occurrence: evaluate every right-hand side in the pre-state,
// then write all targets at once. Throws GuardFalseError if the guard does
// not hold, DomainError if an assigned nat exceeds its bound.
Valuation step(const Machine& m, const Valuation& v, uint32_t event,
               const Binding& b);
Valuation step(const Machine& m, const Valuation& v, std::string_view event,
               const Binding& b);

// Value of a system's variant in the given state.
uint64_t variant_value(const Machine& m, const SystemDef& s, const Valuation& v);

}  // namespace subst
