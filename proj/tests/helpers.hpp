#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "subst/commerce.hpp"

namespace subst::testing {

inline uint64_t mask_of(const Universe& u, std::initializer_list<const char*> names) {
  uint64_t mask = 0;
  for (const char* name : names) mask |= uint64_t{1} << u.require_index(name);
  return mask;
}

inline Value slot(const Machine& m, const Valuation& v, std::string_view var) {
  return v.slots.at(*m.var_index(var));
}

inline Valuation with_slot(const Machine& m, Valuation v, std::string_view var,
                           Value value) {
  v.slots.at(*m.var_index(var)) = value;
  return v;
}

// A one-variable machine with no events, for boundary cases.
inline Machine tiny_machine(uint64_t init_nat, uint64_t bound,
                            std::vector<ExprPtr> invariants = {}) {
  Machine m;
  m.name = "tiny";
  m.universe = Universe({"a", "b"});
  m.vars = {{"x", Kind::Nat, bound}};
  m.init.slots = {Value::nat(init_nat)};
  m.invariants = std::move(invariants);
  validate(m);
  return m;
}

}  // namespace subst::testing
