#include "subst/json_io.hpp"

#include <algorithm>
#include <fstream>

namespace subst {

namespace {

// Strict parsing: every present field must be in the allowed list.
void check_fields(const Json& j, std::initializer_list<const char*> allowed,
                  const char* where) {
  if (!j.is_object()) throw ParseError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known)
      throw ParseError(std::string(where) + ": unknown field '" + key + "'");
  }
}

const Json& require(const Json& j, const char* field, const char* where) {
  auto it = j.find(field);
  if (it == j.end())
    throw ParseError(std::string(where) + ": missing field '" + field + "'");
  return *it;
}

std::string require_string(const Json& j, const char* field, const char* where) {
  const Json& v = require(j, field, where);
  if (!v.is_string())
    throw ParseError(std::string(where) + ": field '" + field + "' must be a string");
  return v.get<std::string>();
}

uint64_t require_nat(const Json& v, const char* where) {
  if (!v.is_number_unsigned())
    throw ParseError(std::string(where) + ": expected a non-negative integer");
  return v.get<uint64_t>();
}

uint32_t parse_atom_name(const Json& v, const Universe& u, const char* where) {
  if (!v.is_string())
    throw ParseError(std::string(where) + ": expected an atom name");
  auto idx = u.index_of(v.get<std::string>());
  if (!idx)
    throw ParseError(std::string(where) + ": '" + v.get<std::string>() +
                     "' is not in the universe");
  return *idx;
}

Json mask_to_json(uint64_t mask, const Universe& u) {
  Json out = Json::array();
  for_each_atom(mask, [&](uint32_t i) { out.push_back(u.atom_name(i)); });
  return out;
}

uint64_t mask_from_json(const Json& j, const Universe& u, const char* where) {
  if (!j.is_array())
    throw ParseError(std::string(where) + ": expected an array of atom names");
  uint64_t mask = 0;
  for (const Json& el : j) mask |= uint64_t{1} << parse_atom_name(el, u, where);
  return mask;
}

Json domain_to_json(const ParamDomain& d, const Universe& u) {
  Json out;
  switch (d.tag) {
    case ParamDomain::Tag::UniverseAll:
      out["kind"] = "universe";
      break;
    case ParamDomain::Tag::Atoms: {
      out["kind"] = "atoms";
      Json names = Json::array();
      for (uint32_t i : d.atom_indices) names.push_back(u.atom_name(i));
      out["atoms"] = std::move(names);
      break;
    }
    case ParamDomain::Tag::NatRange:
      out["kind"] = "nat";
      out["lo"] = d.lo;
      out["hi"] = d.hi;
      break;
    case ParamDomain::Tag::Bools:
      out["kind"] = "bool";
      break;
  }
  return out;
}

ParamDomain domain_from_json(const Json& j, const Universe& u) {
  std::string kind = require_string(j, "kind", "domain");
  if (kind == "universe") {
    check_fields(j, {"kind"}, "domain");
    return ParamDomain::universe_all();
  }
  if (kind == "atoms") {
    check_fields(j, {"kind", "atoms"}, "domain");
    const Json& names = require(j, "atoms", "domain");
    if (!names.is_array()) throw ParseError("domain: 'atoms' must be an array");
    std::vector<uint32_t> indices;
    for (const Json& el : names) indices.push_back(parse_atom_name(el, u, "domain"));
    return ParamDomain::atoms(std::move(indices));
  }
  if (kind == "nat") {
    check_fields(j, {"kind", "lo", "hi"}, "domain");
    return ParamDomain::nat_range(require_nat(require(j, "lo", "domain"), "domain lo"),
                                  require_nat(require(j, "hi", "domain"), "domain hi"));
  }
  if (kind == "bool") {
    check_fields(j, {"kind"}, "domain");
    return ParamDomain::bools();
  }
  throw ParseError("domain: unknown kind '" + kind + "'");
}

struct OpSpec {
  ExprOp op;
  const char* name;
  // Argument shape: 2 = lhs/rhs, 1 = arg, 0 = special-cased.
  int arity;
};

constexpr OpSpec kOps[] = {
    {ExprOp::Union, "union", 2},     {ExprOp::Inter, "inter", 2},
    {ExprOp::Diff, "diff", 2},       {ExprOp::Card, "card", 1},
    {ExprOp::Add, "add", 2},         {ExprOp::Sub, "sub", 2},
    {ExprOp::Eq, "eq", 2},           {ExprOp::Le, "le", 2},
    {ExprOp::Lt, "lt", 2},           {ExprOp::In, "in", 0},
    {ExprOp::Subset, "subset", 2},   {ExprOp::And, "and", 2},
    {ExprOp::Or, "or", 2},           {ExprOp::Implies, "implies", 2},
    {ExprOp::Not, "not", 1},         {ExprOp::Forall, "forall", 0},
    {ExprOp::Exists, "exists", 0},
};

const OpSpec* op_by_name(const std::string& name) {
  for (const OpSpec& s : kOps)
    if (name == s.name) return &s;
  return nullptr;
}

const OpSpec* op_by_op(ExprOp op) {
  for (const OpSpec& s : kOps)
    if (op == s.op) return &s;
  return nullptr;
}

}  // namespace

Json expr_to_json(const Expr& e, const Universe& u) {
  Json out;
  switch (e.op) {
    case ExprOp::NatLit:
      out["nat"] = e.nat_value;
      return out;
    case ExprOp::BoolLit:
      out["bool"] = e.bool_value;
      return out;
    case ExprOp::AtomLit:
      out["atom"] = u.atom_name(e.atom_index);
      return out;
    case ExprOp::SetLit: {
      // Atom elements abbreviate to their names; any other element (such as
      // an event parameter) nests as a full expression object.
      Json els = Json::array();
      for (const ExprPtr& k : e.kids) {
        if (k->op == ExprOp::AtomLit)
          els.push_back(u.atom_name(k->atom_index));
        else
          els.push_back(expr_to_json(*k, u));
      }
      out["set"] = std::move(els);
      return out;
    }
    case ExprOp::Var:
      out["var"] = e.name;
      return out;
    case ExprOp::In:
      out["op"] = "in";
      out["elem"] = expr_to_json(*e.kids[0], u);
      out["set"] = expr_to_json(*e.kids[1], u);
      return out;
    case ExprOp::Forall:
    case ExprOp::Exists:
      out["op"] = e.op == ExprOp::Forall ? "forall" : "exists";
      out["bind"] = e.name;
      out["domain"] = domain_to_json(e.domain, u);
      out["body"] = expr_to_json(*e.kids[0], u);
      return out;
    default: {
      const OpSpec* spec = op_by_op(e.op);
      out["op"] = spec->name;
      if (spec->arity == 1) {
        out["arg"] = expr_to_json(*e.kids[0], u);
      } else {
        out["lhs"] = expr_to_json(*e.kids[0], u);
        out["rhs"] = expr_to_json(*e.kids[1], u);
      }
      return out;
    }
  }
}

ExprPtr expr_from_json(const Json& j, const Universe& u) {
  if (!j.is_object()) throw ParseError("expression: expected a tagged object");
  // Operator nodes may carry a "set" operand field, so "op" decides first.
  if (!j.contains("op") && j.contains("nat")) {
    check_fields(j, {"nat"}, "expression");
    return ex::nat(require_nat(j["nat"], "nat literal"));
  }
  if (!j.contains("op") && j.contains("bool")) {
    check_fields(j, {"bool"}, "expression");
    if (!j["bool"].is_boolean()) throw ParseError("bool literal: expected true/false");
    return ex::boolean(j["bool"].get<bool>());
  }
  if (!j.contains("op") && j.contains("atom")) {
    check_fields(j, {"atom"}, "expression");
    return ex::atom(parse_atom_name(j["atom"], u, "atom literal"));
  }
  if (!j.contains("op") && j.contains("set")) {
    check_fields(j, {"set"}, "expression");
    const Json& els = j["set"];
    if (!els.is_array()) throw ParseError("set literal: expected an array");
    std::vector<ExprPtr> kids;
    for (const Json& el : els) {
      if (el.is_string())
        kids.push_back(ex::atom(parse_atom_name(el, u, "set literal")));
      else if (el.is_object())
        kids.push_back(expr_from_json(el, u));
      else
        throw ParseError("set literal: elements are atom names or expressions");
    }
    return ex::set_of(std::move(kids));
  }
  if (!j.contains("op") && j.contains("var")) {
    check_fields(j, {"var"}, "expression");
    if (!j["var"].is_string()) throw ParseError("variable reference: expected a name");
    return ex::var(j["var"].get<std::string>());
  }
  std::string op = require_string(j, "op", "expression");
  const OpSpec* spec = op_by_name(op);
  if (!spec) throw ParseError("expression: unknown op '" + op + "'");
  if (spec->op == ExprOp::In) {
    check_fields(j, {"op", "elem", "set"}, "expression");
    return ex::in(expr_from_json(require(j, "elem", "in"), u),
                  expr_from_json(require(j, "set", "in"), u));
  }
  if (spec->op == ExprOp::Forall || spec->op == ExprOp::Exists) {
    check_fields(j, {"op", "bind", "domain", "body"}, "expression");
    std::string bind = require_string(j, "bind", op.c_str());
    ParamDomain domain = domain_from_json(require(j, "domain", op.c_str()), u);
    ExprPtr body = expr_from_json(require(j, "body", op.c_str()), u);
    return spec->op == ExprOp::Forall ? ex::forall(bind, domain, body)
                                      : ex::exists(bind, domain, body);
  }
  if (spec->arity == 1) {
    check_fields(j, {"op", "arg"}, "expression");
    ExprPtr arg = expr_from_json(require(j, "arg", op.c_str()), u);
    return spec->op == ExprOp::Card ? ex::card(arg) : ex::not_(arg);
  }
  check_fields(j, {"op", "lhs", "rhs"}, "expression");
  ExprPtr lhs = expr_from_json(require(j, "lhs", op.c_str()), u);
  ExprPtr rhs = expr_from_json(require(j, "rhs", op.c_str()), u);
  switch (spec->op) {
    case ExprOp::Union:
      return ex::union_(lhs, rhs);
    case ExprOp::Inter:
      return ex::inter(lhs, rhs);
    case ExprOp::Diff:
      return ex::diff(lhs, rhs);
    case ExprOp::Add:
      return ex::add(lhs, rhs);
    case ExprOp::Sub:
      return ex::sub(lhs, rhs);
    case ExprOp::Eq:
      return ex::eq(lhs, rhs);
    case ExprOp::Le:
      return ex::le(lhs, rhs);
    case ExprOp::Lt:
      return ex::lt(lhs, rhs);
    case ExprOp::Subset:
      return ex::subset(lhs, rhs);
    case ExprOp::And:
      return ex::and_(lhs, rhs);
    case ExprOp::Or:
      return ex::or_(lhs, rhs);
    case ExprOp::Implies:
      return ex::implies(lhs, rhs);
    default:
      throw ParseError("expression: unknown op '" + op + "'");
  }
}

Json value_to_json(const Value& v, const Universe& u) {
  switch (v.kind) {
    case Kind::Nat:
      return Json(v.raw);
    case Kind::Bool:
      return Json(v.raw != 0);
    case Kind::Set:
      return mask_to_json(v.raw, u);
    case Kind::Atom:
      return Json(u.atom_name(static_cast<uint32_t>(v.raw)));
  }
  throw ParseError("value with unknown kind");
}

namespace {

Value value_from_json(const Json& j, Kind kind, const Universe& u, const char* where) {
  switch (kind) {
    case Kind::Nat:
      return Value::nat(require_nat(j, where));
    case Kind::Bool:
      if (!j.is_boolean())
        throw ParseError(std::string(where) + ": expected true/false");
      return Value::boolean(j.get<bool>());
    case Kind::Set:
      return Value::set(mask_from_json(j, u, where));
    case Kind::Atom:
      return Value::atom(parse_atom_name(j, u, where));
  }
  throw ParseError(std::string(where) + ": unknown kind");
}

const char* var_kind_name(Kind k) {
  switch (k) {
    case Kind::Nat:
      return "nat";
    case Kind::Bool:
      return "bool";
    case Kind::Set:
      return "atomset";
    default:
      return "atom";
  }
}

}  // namespace

Json valuation_to_json(const Machine& m, const Valuation& v) {
  Json out;
  for (size_t i = 0; i < m.vars.size(); ++i)
    out[m.vars[i].name] = value_to_json(v.slots[i], m.universe);
  return out;
}

Valuation valuation_from_json(const Machine& m, const Json& j) {
  if (!j.is_object()) throw ParseError("valuation: expected an object");
  for (const auto& [key, _] : j.items())
    if (!m.var_index(key)) throw ParseError("valuation: unknown variable '" + key + "'");
  Valuation v;
  v.slots.reserve(m.vars.size());
  for (const VarDecl& decl : m.vars) {
    auto it = j.find(decl.name);
    if (it == j.end()) throw ParseError("valuation: missing variable '" + decl.name + "'");
    v.slots.push_back(
        value_from_json(*it, decl.kind, m.universe, ("valuation." + decl.name).c_str()));
  }
  return v;
}

Json machine_to_json(const Machine& m) {
  Json out;
  out["name"] = m.name;
  Json universe = Json::array();
  for (const std::string& a : m.universe.atoms()) universe.push_back(a);
  out["universe"] = std::move(universe);

  Json variables = Json::array();
  for (const VarDecl& v : m.vars) {
    Json var;
    var["name"] = v.name;
    var["kind"] = var_kind_name(v.kind);
    if (v.kind == Kind::Nat) var["bound"] = v.nat_bound;
    variables.push_back(std::move(var));
  }
  out["variables"] = std::move(variables);

  out["init"] = valuation_to_json(m, m.init);

  Json invariants = Json::array();
  for (const ExprPtr& inv : m.invariants) invariants.push_back(expr_to_json(*inv, m.universe));
  out["invariants"] = std::move(invariants);

  if (m.variant) out["variant"] = expr_to_json(*m.variant, m.universe);
  if (m.checkpoint) out["checkpoint"] = expr_to_json(*m.checkpoint, m.universe);

  Json events = Json::array();
  for (const GuardedEvent& e : m.events) {
    Json ev;
    ev["name"] = e.name;
    Json params = Json::array();
    for (const ParamDecl& p : e.params) {
      Json param;
      param["name"] = p.name;
      param["domain"] = domain_to_json(p.domain, m.universe);
      params.push_back(std::move(param));
    }
    ev["params"] = std::move(params);
    ev["guard"] = expr_to_json(*e.guard, m.universe);
    Json assigns = Json::array();
    for (const Assignment& a : e.assigns) {
      Json assign;
      assign["var"] = m.vars[a.var].name;
      assign["expr"] = expr_to_json(*a.rhs, m.universe);
      assigns.push_back(std::move(assign));
    }
    ev["assignments"] = std::move(assigns);
    if (e.convergent) ev["convergent"] = true;
    events.push_back(std::move(ev));
  }
  out["events"] = std::move(events);

  Json systems = Json::array();
  for (const SystemDef& s : m.systems) {
    Json sys;
    sys["id"] = s.id;
    Json sv = Json::array();
    for (uint32_t i : s.vars) sv.push_back(m.vars[i].name);
    sys["sv"] = std::move(sv);
    sys["variant"] = expr_to_json(*s.variant, m.universe);
    systems.push_back(std::move(sys));
  }
  out["systems"] = std::move(systems);
  return out;
}

Machine machine_from_json(const Json& j) {
  check_fields(j,
               {"name", "universe", "variables", "init", "invariants", "variant",
                "checkpoint", "events", "systems"},
               "machine");
  Machine m;
  if (j.contains("name")) m.name = require_string(j, "name", "machine");

  const Json& universe = require(j, "universe", "machine");
  if (!universe.is_array()) throw ParseError("machine: 'universe' must be an array");
  std::vector<std::string> atoms;
  for (const Json& a : universe) {
    if (!a.is_string()) throw ParseError("universe: expected atom names");
    atoms.push_back(a.get<std::string>());
  }
  m.universe = Universe(std::move(atoms));

  const Json& variables = require(j, "variables", "machine");
  if (!variables.is_array()) throw ParseError("machine: 'variables' must be an array");
  for (const Json& var : variables) {
    check_fields(var, {"name", "kind", "bound"}, "variable");
    VarDecl decl;
    decl.name = require_string(var, "name", "variable");
    std::string kind = require_string(var, "kind", "variable");
    if (kind == "nat") {
      decl.kind = Kind::Nat;
      decl.nat_bound = require_nat(require(var, "bound", "variable"), "variable bound");
    } else if (kind == "bool") {
      decl.kind = Kind::Bool;
      if (var.contains("bound")) throw ParseError("variable: 'bound' only applies to nat");
    } else if (kind == "atomset") {
      decl.kind = Kind::Set;
      if (var.contains("bound")) throw ParseError("variable: 'bound' only applies to nat");
    } else {
      throw ParseError("variable: unknown kind '" + kind + "'");
    }
    m.vars.push_back(std::move(decl));
  }

  const Json& init = require(j, "init", "machine");
  if (!init.is_object()) throw ParseError("machine: 'init' must be an object");
  for (const auto& [key, _] : init.items())
    if (!m.var_index(key))
      throw ParseError("init: unknown variable '" + key + "'");
  m.init.slots.reserve(m.vars.size());
  for (const VarDecl& decl : m.vars) {
    auto it = init.find(decl.name);
    if (it == init.end())
      throw ParseError("init: missing variable '" + decl.name + "'");
    m.init.slots.push_back(
        value_from_json(*it, decl.kind, m.universe, ("init." + decl.name).c_str()));
  }

  const Json& invariants = require(j, "invariants", "machine");
  if (!invariants.is_array()) throw ParseError("machine: 'invariants' must be an array");
  for (const Json& inv : invariants) m.invariants.push_back(expr_from_json(inv, m.universe));

  if (j.contains("variant")) m.variant = expr_from_json(j["variant"], m.universe);
  if (j.contains("checkpoint")) m.checkpoint = expr_from_json(j["checkpoint"], m.universe);

  const Json& events = require(j, "events", "machine");
  if (!events.is_array()) throw ParseError("machine: 'events' must be an array");
  for (const Json& ev : events) {
    check_fields(ev, {"name", "params", "guard", "assignments", "convergent"}, "event");
    GuardedEvent e;
    e.name = require_string(ev, "name", "event");
    const Json& params = require(ev, "params", "event");
    if (!params.is_array()) throw ParseError("event: 'params' must be an array");
    for (const Json& p : params) {
      check_fields(p, {"name", "domain"}, "param");
      ParamDecl decl;
      decl.name = require_string(p, "name", "param");
      decl.domain = domain_from_json(require(p, "domain", "param"), m.universe);
      e.params.push_back(std::move(decl));
    }
    e.guard = expr_from_json(require(ev, "guard", "event"), m.universe);
    const Json& assigns = require(ev, "assignments", "event");
    if (!assigns.is_array()) throw ParseError("event: 'assignments' must be an array");
    for (const Json& a : assigns) {
      check_fields(a, {"var", "expr"}, "assignment");
      Assignment assign;
      std::string target = require_string(a, "var", "assignment");
      auto idx = m.var_index(target);
      if (!idx) throw ParseError("assignment: unknown variable '" + target + "'");
      assign.var = *idx;
      assign.rhs = expr_from_json(require(a, "expr", "assignment"), m.universe);
      e.assigns.push_back(std::move(assign));
    }
    if (ev.contains("convergent")) {
      if (!ev["convergent"].is_boolean())
        throw ParseError("event: 'convergent' must be a boolean");
      e.convergent = ev["convergent"].get<bool>();
    }
    m.events.push_back(std::move(e));
  }

  const Json& systems = require(j, "systems", "machine");
  if (!systems.is_array()) throw ParseError("machine: 'systems' must be an array");
  for (const Json& sys : systems) {
    check_fields(sys, {"id", "sv", "variant"}, "system");
    SystemDef s;
    s.id = require_string(sys, "id", "system");
    const Json& sv = require(sys, "sv", "system");
    if (!sv.is_array()) throw ParseError("system: 'sv' must be an array");
    for (const Json& name : sv) {
      if (!name.is_string()) throw ParseError("system: 'sv' entries must be names");
      auto idx = m.var_index(name.get<std::string>());
      if (!idx)
        throw ParseError("system: unknown variable '" + name.get<std::string>() + "'");
      s.vars.push_back(*idx);
    }
    std::sort(s.vars.begin(), s.vars.end());
    s.variant = expr_from_json(require(sys, "variant", "system"), m.universe);
    m.systems.push_back(std::move(s));
  }

  validate(m);
  return m;
}

Machine load_machine(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
  return machine_from_json(j);
}

void save_machine(const Machine& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << machine_to_json(m).dump(2) << "\n";
}

}  // namespace subst
