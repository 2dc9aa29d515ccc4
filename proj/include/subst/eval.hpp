#pragma once

#include "subst/machine.hpp"

namespace subst {

// Evaluation environment: a variable layout with its valuation, plus a stack
// of overlay bindings for event parameters and quantifier variables. The
// innermost binding wins.
struct Env {
  const Universe* universe = nullptr;
  const std::vector<VarDecl>* vars = nullptr;
  const Valuation* valuation = nullptr;
  std::vector<std::pair<std::string, Value>> overlay;

  static Env of(const Machine& m, const Valuation& v);

  void bind(std::string name, Value value) { overlay.emplace_back(std::move(name), value); }
  void unbind() { overlay.pop_back(); }
  std::optional<Value> lookup(std::string_view name) const;
};

// Total on well-sorted expressions over total valuations; deterministic.
// Natural subtraction floors at 0, so card-difference variants rely on
// cardinality monotonicity, not on negative intermediate values.
Value eval(const Expr& e, Env& env);

Value eval(const Machine& m, const Valuation& v, const Expr& e);
bool eval_pred(const Machine& m, const Valuation& v, const Expr& e);
uint64_t eval_nat(const Machine& m, const Valuation& v, const Expr& e);

// Index of the first invariant the state violates, in declaration order.
std::optional<uint32_t> violated_invariant(const Machine& m, const Valuation& v);

}  // namespace subst
