#include "subst/exec.hpp"

#include "subst/errors.hpp"

namespace subst {

Valuation initialize(const Machine& m) {
  if (auto bad = violated_invariant(m, m.init))
    throw InitViolatesInvariantError("init state of '" + m.name +
                                     "' violates invariant " + std::to_string(*bad) + ": " +
                                     expr_to_string(*m.invariants[*bad], m.universe));
  return m.init;
}

std::vector<Binding> event_bindings(const Machine& m, const GuardedEvent& e) {
  std::vector<Binding> out{Binding{}};
  for (const ParamDecl& p : e.params) {
    std::vector<Value> domain = p.domain.enumerate(m.universe);
    std::vector<Binding> next;
    next.reserve(out.size() * domain.size());
    for (const Binding& prefix : out)
      for (const Value& v : domain) {
        Binding b = prefix;
        b.push_back(v);
        next.push_back(std::move(b));
      }
    out = std::move(next);
  }
  return out;
}

namespace {

Env bound_env(const Machine& m, const Valuation& v, const GuardedEvent& e,
              const Binding& b) {
  Env env = Env::of(m, v);
  for (size_t i = 0; i < e.params.size(); ++i) env.bind(e.params[i].name, b[i]);
  return env;
}

}  // namespace

bool guard_holds(const Machine& m, const Valuation& v, const GuardedEvent& e,
                 const Binding& b) {
  Env env = bound_env(m, v, e, b);
  return eval(*e.guard, env).as_bool();
}

std::vector<EnabledEvent> enabled(const Machine& m, const Valuation& v) {
  std::vector<EnabledEvent> out;
  for (uint32_t i = 0; i < m.events.size(); ++i)
    for (Binding& b : event_bindings(m, m.events[i]))
      if (guard_holds(m, v, m.events[i], b)) out.push_back({i, std::move(b)});
  return out;
}

Valuation step(const Machine& m, const Valuation& v, uint32_t event,
               const Binding& b) {
  const GuardedEvent& e = m.events.at(event);
  Env env = bound_env(m, v, e, b);
  if (!eval(*e.guard, env).as_bool())
    throw GuardFalseError("guard of '" + e.name + "' is false in " +
                          valuation_to_string(m, v));
  // Parallel assignment: all right-hand sides see the pre-state.
  std::vector<std::pair<uint32_t, Value>> writes;
  writes.reserve(e.assigns.size());
  for (const Assignment& a : e.assigns) writes.emplace_back(a.var, eval(*a.rhs, env));
  Valuation post = v;
  for (const auto& [var, val] : writes) {
    const VarDecl& decl = m.vars[var];
    if (decl.kind == Kind::Nat && val.as_nat() > decl.nat_bound)
      throw DomainError("event '" + e.name + "' assigns " + std::to_string(val.as_nat()) +
                        " to '" + decl.name + "' (bound " +
                        std::to_string(decl.nat_bound) + ")");
    post.slots[var] = val;
  }
  return post;
}

Valuation step(const Machine& m, const Valuation& v, std::string_view event,
               const Binding& b) {
  auto idx = m.event_index(event);
  if (!idx) throw UnknownEventError("machine '" + m.name + "' has no event '" +
                                    std::string(event) + "'");
  return step(m, v, *idx, b);
}

uint64_t variant_value(const Machine& m, const SystemDef& s, const Valuation& v) {
  return eval_nat(m, v, *s.variant);
}

}  // namespace subst
