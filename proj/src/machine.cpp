#include "subst/machine.hpp"

#include <algorithm>
#include <set>

namespace subst {

bool valuation_less(const Valuation& a, const Valuation& b) {
  size_t n = std::min(a.slots.size(), b.slots.size());
  for (size_t i = 0; i < n; ++i) {
    if (a.slots[i] == b.slots[i]) continue;
    return value_less(a.slots[i], b.slots[i]);
  }
  return a.slots.size() < b.slots.size();
}

size_t ValuationHash::operator()(const Valuation& v) const {
  // FNV-1a over the slot payloads.
  uint64_t h = 1469598103934665603ull;
  for (const Value& x : v.slots) {
    h = (h ^ static_cast<uint64_t>(x.kind)) * 1099511628211ull;
    h = (h ^ x.raw) * 1099511628211ull;
  }
  return static_cast<size_t>(h);
}

std::optional<uint32_t> Machine::var_index(std::string_view name) const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<uint32_t>(i);
  return std::nullopt;
}

std::optional<uint32_t> Machine::event_index(std::string_view name) const {
  for (size_t i = 0; i < events.size(); ++i)
    if (events[i].name == name) return static_cast<uint32_t>(i);
  return std::nullopt;
}

std::optional<uint32_t> Machine::system_index(std::string_view id) const {
  for (size_t i = 0; i < systems.size(); ++i)
    if (systems[i].id == id) return static_cast<uint32_t>(i);
  return std::nullopt;
}

const SystemDef& Machine::require_system(std::string_view id) const {
  auto i = system_index(id);
  if (!i) throw ValidationError("machine '" + name + "' declares no system '" + std::string(id) + "'");
  return systems[*i];
}

SortEnv Machine::var_sorts() const {
  SortEnv env;
  for (const auto& v : vars) env.declare(v.name, v.kind);
  return env;
}

namespace {

void check_value_in_domain(const Machine& m, const VarDecl& decl, const Value& val,
                           const std::string& where) {
  if (val.kind != decl.kind)
    throw ValidationError(where + ": variable '" + decl.name + "' is " + kind_name(decl.kind) +
                          " but the value is " + kind_name(val.kind));
  if (decl.kind == Kind::Nat && val.raw > decl.nat_bound)
    throw DomainError(where + ": variable '" + decl.name + "' holds " + std::to_string(val.raw) +
                      ", above its bound " + std::to_string(decl.nat_bound));
  if (decl.kind == Kind::Set && (val.raw & ~m.universe.full_mask()) != 0)
    throw ValidationError(where + ": variable '" + decl.name + "' holds atoms outside the universe");
}

}  // namespace

void validate(const Machine& m) {
  for (size_t i = 0; i < m.vars.size(); ++i) {
    const auto& v = m.vars[i];
    if (v.name.empty()) throw ValidationError("machine '" + m.name + "': empty variable name");
    if (v.kind == Kind::Atom)
      throw ValidationError("variable '" + v.name + "': atom is not a variable kind");
    for (size_t j = i + 1; j < m.vars.size(); ++j)
      if (v.name == m.vars[j].name)
        throw ValidationError("duplicate variable '" + v.name + "' in machine '" + m.name + "'");
  }

  if (m.init.slots.size() != m.vars.size())
    throw ValidationError("machine '" + m.name + "': init assigns " +
                          std::to_string(m.init.slots.size()) + " of " +
                          std::to_string(m.vars.size()) + " variables");
  for (size_t i = 0; i < m.vars.size(); ++i)
    check_value_in_domain(m, m.vars[i], m.init.slots[i], "init");

  SortEnv env = m.var_sorts();
  for (const auto& inv : m.invariants) require_sort(*inv, Kind::Bool, env, "invariant");
  if (m.variant) require_sort(*m.variant, Kind::Nat, env, "variant");
  if (m.checkpoint) require_sort(*m.checkpoint, Kind::Bool, env, "checkpoint");

  for (size_t i = 0; i < m.events.size(); ++i) {
    const auto& e = m.events[i];
    if (e.name.empty()) throw ValidationError("machine '" + m.name + "': empty event name");
    for (size_t j = i + 1; j < m.events.size(); ++j)
      if (e.name == m.events[j].name)
        throw ValidationError("duplicate event '" + e.name + "'");
    if (!e.guard) throw ValidationError("event '" + e.name + "' has no guard");

    SortEnv local = env;
    for (size_t p = 0; p < e.params.size(); ++p) {
      const auto& par = e.params[p];
      if (m.var_index(par.name))
        throw ValidationError("event '" + e.name + "': parameter '" + par.name +
                              "' shadows a state variable");
      for (size_t q = p + 1; q < e.params.size(); ++q)
        if (par.name == e.params[q].name)
          throw ValidationError("event '" + e.name + "': duplicate parameter '" + par.name + "'");
      for (uint32_t a : par.domain.atom_indices)
        if (a >= m.universe.size())
          throw ValidationError("event '" + e.name + "': parameter domain atom outside universe");
      local.declare(par.name, par.domain.element_kind());
    }

    require_sort(*e.guard, Kind::Bool, local, "guard of '" + e.name + "'");
    std::set<uint32_t> targets;
    for (const auto& a : e.assigns) {
      if (a.var >= m.vars.size())
        throw ValidationError("event '" + e.name + "' assigns an undeclared variable");
      if (!targets.insert(a.var).second)
        throw ValidationError("event '" + e.name + "' assigns '" + m.vars[a.var].name + "' twice");
      require_sort(*a.rhs, m.vars[a.var].kind, local,
                   "assignment to '" + m.vars[a.var].name + "' in '" + e.name + "'");
    }
  }

  std::set<uint32_t> claimed;
  for (size_t i = 0; i < m.systems.size(); ++i) {
    const auto& s = m.systems[i];
    if (s.id.empty()) throw ValidationError("machine '" + m.name + "': empty system id");
    for (size_t j = i + 1; j < m.systems.size(); ++j)
      if (s.id == m.systems[j].id) throw ValidationError("duplicate system '" + s.id + "'");
    std::set<std::string> sv_names;
    for (uint32_t v : s.vars) {
      if (v >= m.vars.size())
        throw ValidationError("system '" + s.id + "' lists an undeclared variable");
      if (!claimed.insert(v).second)
        throw ValidationError("variable '" + m.vars[v].name +
                              "' belongs to two systems; system groups must be disjoint");
      sv_names.insert(m.vars[v].name);
    }
    if (!s.variant) throw ValidationError("system '" + s.id + "' has no variant");
    require_sort(*s.variant, Kind::Nat, env, "variant of system '" + s.id + "'");
    for (const auto& fv : free_vars(*s.variant))
      if (!sv_names.count(fv))
        throw ValidationError("variant of system '" + s.id + "' mentions '" + fv +
                              "', which is outside the system's variables");
  }

  // A convergent event needs a variant to decrease: the machine's own, or the
  // variant of the system the event belongs to.
  bool any_convergent =
      std::any_of(m.events.begin(), m.events.end(), [](const auto& e) { return e.convergent; });
  if (any_convergent && !m.variant) {
    auto owners = attribute_events(m);
    for (size_t i = 0; i < m.events.size(); ++i)
      if (m.events[i].convergent && !owners[i])
        throw ValidationError("convergent event '" + m.events[i].name +
                              "' has no variant: the machine declares none and the event "
                              "belongs to no system");
  }
}

std::vector<uint32_t> event_footprint(const Machine& m, const GuardedEvent& e) {
  std::set<std::string> names = free_vars(*e.guard);
  for (const auto& a : e.assigns) {
    auto rhs = free_vars(*a.rhs);
    names.insert(rhs.begin(), rhs.end());
  }
  std::set<uint32_t> out;
  for (const auto& n : names)
    if (auto i = m.var_index(n)) out.insert(*i);
  for (const auto& a : e.assigns) out.insert(a.var);
  return {out.begin(), out.end()};
}

std::vector<std::optional<uint32_t>> attribute_events(const Machine& m) {
  std::vector<std::optional<uint32_t>> owners(m.events.size());
  if (m.systems.empty()) return owners;
  std::vector<int> var_owner(m.vars.size(), -1);
  for (size_t s = 0; s < m.systems.size(); ++s)
    for (uint32_t v : m.systems[s].vars) var_owner[v] = static_cast<int>(s);
  for (size_t i = 0; i < m.events.size(); ++i) {
    for (uint32_t v : event_footprint(m, m.events[i])) {
      if (var_owner[v] < 0) continue;
      uint32_t s = static_cast<uint32_t>(var_owner[v]);
      if (owners[i] && *owners[i] != s)
        throw ValidationError("event '" + m.events[i].name + "' touches variables of systems '" +
                              m.systems[*owners[i]].id + "' and '" + m.systems[s].id + "'");
      owners[i] = s;
    }
  }
  return owners;
}

std::string valuation_to_string(const Machine& m, const Valuation& v) {
  std::string out = "{";
  for (size_t i = 0; i < m.vars.size(); ++i) {
    if (i) out += ", ";
    out += m.vars[i].name + "=" + value_to_string(v.slots[i], m.universe);
  }
  return out + "}";
}

}  // namespace subst
