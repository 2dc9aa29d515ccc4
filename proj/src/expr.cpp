#include "subst/expr.hpp"

#include <algorithm>

namespace subst {

ParamDomain ParamDomain::atoms(std::vector<uint32_t> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  ParamDomain d;
  d.tag = Tag::Atoms;
  d.atom_indices = std::move(indices);
  return d;
}

Kind ParamDomain::element_kind() const {
  switch (tag) {
    case Tag::UniverseAll:
    case Tag::Atoms:
      return Kind::Atom;
    case Tag::NatRange:
      return Kind::Nat;
    case Tag::Bools:
      return Kind::Bool;
  }
  return Kind::Atom;
}

std::vector<Value> ParamDomain::enumerate(const Universe& u) const {
  std::vector<Value> out;
  switch (tag) {
    case Tag::UniverseAll:
      for (uint32_t i = 0; i < u.size(); ++i) out.push_back(Value::atom(i));
      break;
    case Tag::Atoms:
      for (uint32_t i : atom_indices) {
        if (i >= u.size()) throw ValidationError("domain atom index outside the universe");
        out.push_back(Value::atom(i));
      }
      break;
    case Tag::NatRange:
      for (uint64_t n = lo; n <= hi; ++n) {
        out.push_back(Value::nat(n));
        if (n == hi) break;  // hi may be UINT64_MAX
      }
      break;
    case Tag::Bools:
      out.push_back(Value::boolean(false));
      out.push_back(Value::boolean(true));
      break;
  }
  return out;
}

namespace ex {

namespace {

ExprPtr node(ExprOp op, std::vector<ExprPtr> kids = {}) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->kids = std::move(kids);
  return e;
}

}  // namespace

ExprPtr nat(uint64_t n) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::NatLit;
  e->nat_value = n;
  return e;
}

ExprPtr boolean(bool b) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::BoolLit;
  e->bool_value = b;
  return e;
}

ExprPtr atom(uint32_t index) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::AtomLit;
  e->atom_index = index;
  return e;
}

ExprPtr set_of(std::vector<ExprPtr> elements) { return node(ExprOp::SetLit, std::move(elements)); }

ExprPtr set_const(uint64_t mask) {
  std::vector<ExprPtr> elements;
  for_each_atom(mask, [&](uint32_t i) { elements.push_back(atom(i)); });
  return set_of(std::move(elements));
}

ExprPtr var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr union_(ExprPtr a, ExprPtr b) { return node(ExprOp::Union, {std::move(a), std::move(b)}); }
ExprPtr inter(ExprPtr a, ExprPtr b) { return node(ExprOp::Inter, {std::move(a), std::move(b)}); }
ExprPtr diff(ExprPtr a, ExprPtr b) { return node(ExprOp::Diff, {std::move(a), std::move(b)}); }
ExprPtr card(ExprPtr s) { return node(ExprOp::Card, {std::move(s)}); }

ExprPtr add(ExprPtr a, ExprPtr b) { return node(ExprOp::Add, {std::move(a), std::move(b)}); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return node(ExprOp::Sub, {std::move(a), std::move(b)}); }

ExprPtr eq(ExprPtr a, ExprPtr b) { return node(ExprOp::Eq, {std::move(a), std::move(b)}); }
ExprPtr le(ExprPtr a, ExprPtr b) { return node(ExprOp::Le, {std::move(a), std::move(b)}); }
ExprPtr lt(ExprPtr a, ExprPtr b) { return node(ExprOp::Lt, {std::move(a), std::move(b)}); }
ExprPtr in(ExprPtr element, ExprPtr set) {
  return node(ExprOp::In, {std::move(element), std::move(set)});
}
ExprPtr subset(ExprPtr a, ExprPtr b) { return node(ExprOp::Subset, {std::move(a), std::move(b)}); }

ExprPtr and_(ExprPtr a, ExprPtr b) { return node(ExprOp::And, {std::move(a), std::move(b)}); }
ExprPtr or_(ExprPtr a, ExprPtr b) { return node(ExprOp::Or, {std::move(a), std::move(b)}); }
ExprPtr implies(ExprPtr a, ExprPtr b) { return node(ExprOp::Implies, {std::move(a), std::move(b)}); }
ExprPtr not_(ExprPtr a) { return node(ExprOp::Not, {std::move(a)}); }

ExprPtr all_of(std::vector<ExprPtr> preds) {
  if (preds.empty()) return boolean(true);
  ExprPtr out = preds.front();
  for (size_t i = 1; i < preds.size(); ++i) out = and_(out, preds[i]);
  return out;
}

namespace {

ExprPtr quantifier(ExprOp op, std::string binder, ParamDomain domain, ExprPtr body) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->name = std::move(binder);
  e->domain = std::move(domain);
  e->kids.push_back(std::move(body));
  return e;
}

}  // namespace

ExprPtr forall(std::string binder, ParamDomain domain, ExprPtr body) {
  return quantifier(ExprOp::Forall, std::move(binder), std::move(domain), std::move(body));
}

ExprPtr exists(std::string binder, ParamDomain domain, ExprPtr body) {
  return quantifier(ExprOp::Exists, std::move(binder), std::move(domain), std::move(body));
}

}  // namespace ex

std::optional<Kind> SortEnv::lookup(std::string_view name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == name) return it->second;
  return std::nullopt;
}

namespace {

Kind binary_same(const Expr& e, Kind operand, Kind result, SortEnv& env, const char* what) {
  if (e.kids.size() != 2) throw SortError(std::string(what) + " takes two operands");
  require_sort(*e.kids[0], operand, env, what);
  require_sort(*e.kids[1], operand, env, what);
  return result;
}

}  // namespace

Kind sort_of(const Expr& e, SortEnv& env) {
  switch (e.op) {
    case ExprOp::NatLit:
      return Kind::Nat;
    case ExprOp::BoolLit:
      return Kind::Bool;
    case ExprOp::AtomLit:
      return Kind::Atom;
    case ExprOp::SetLit:
      for (const auto& k : e.kids) require_sort(*k, Kind::Atom, env, "set element");
      return Kind::Set;
    case ExprOp::Var: {
      auto k = env.lookup(e.name);
      if (!k) throw UnboundVariableError("unbound variable '" + e.name + "'");
      return *k;
    }
    case ExprOp::Union:
      return binary_same(e, Kind::Set, Kind::Set, env, "union");
    case ExprOp::Inter:
      return binary_same(e, Kind::Set, Kind::Set, env, "inter");
    case ExprOp::Diff:
      return binary_same(e, Kind::Set, Kind::Set, env, "diff");
    case ExprOp::Card:
      if (e.kids.size() != 1) throw SortError("card takes one operand");
      require_sort(*e.kids[0], Kind::Set, env, "card");
      return Kind::Nat;
    case ExprOp::Add:
      return binary_same(e, Kind::Nat, Kind::Nat, env, "add");
    case ExprOp::Sub:
      return binary_same(e, Kind::Nat, Kind::Nat, env, "sub");
    case ExprOp::Eq: {
      if (e.kids.size() != 2) throw SortError("= takes two operands");
      Kind a = sort_of(*e.kids[0], env);
      Kind b = sort_of(*e.kids[1], env);
      if (a != b)
        throw SortError(std::string("= compares ") + kind_name(a) + " against " + kind_name(b));
      return Kind::Bool;
    }
    case ExprOp::Le:
      return binary_same(e, Kind::Nat, Kind::Bool, env, "<=");
    case ExprOp::Lt:
      return binary_same(e, Kind::Nat, Kind::Bool, env, "<");
    case ExprOp::In:
      if (e.kids.size() != 2) throw SortError("in takes two operands");
      require_sort(*e.kids[0], Kind::Atom, env, "in (element)");
      require_sort(*e.kids[1], Kind::Set, env, "in (set)");
      return Kind::Bool;
    case ExprOp::Subset:
      return binary_same(e, Kind::Set, Kind::Bool, env, "subset");
    case ExprOp::And:
      return binary_same(e, Kind::Bool, Kind::Bool, env, "and");
    case ExprOp::Or:
      return binary_same(e, Kind::Bool, Kind::Bool, env, "or");
    case ExprOp::Implies:
      return binary_same(e, Kind::Bool, Kind::Bool, env, "implies");
    case ExprOp::Not:
      if (e.kids.size() != 1) throw SortError("not takes one operand");
      require_sort(*e.kids[0], Kind::Bool, env, "not");
      return Kind::Bool;
    case ExprOp::Forall:
    case ExprOp::Exists: {
      if (e.kids.size() != 1) throw SortError("quantifier takes one body");
      env.declare(e.name, e.domain.element_kind());
      try {
        require_sort(*e.kids[0], Kind::Bool, env, "quantifier body");
      } catch (...) {
        env.pop();
        throw;
      }
      env.pop();
      return Kind::Bool;
    }
  }
  throw SortError("unknown expression node");
}

void require_sort(const Expr& e, Kind expected, SortEnv& env, const std::string& where) {
  Kind got = sort_of(e, env);
  if (got != expected)
    throw SortError(where + ": expected " + kind_name(expected) + ", got " + kind_name(got));
}

namespace {

void collect_free(const Expr& e, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (e.op) {
    case ExprOp::Var:
      if (std::find(bound.begin(), bound.end(), e.name) == bound.end()) out.insert(e.name);
      return;
    case ExprOp::Forall:
    case ExprOp::Exists:
      bound.push_back(e.name);
      collect_free(*e.kids[0], bound, out);
      bound.pop_back();
      return;
    default:
      for (const auto& k : e.kids) collect_free(*k, bound, out);
  }
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(e, bound, out);
  return out;
}

namespace {

std::string domain_to_string(const ParamDomain& d, const Universe& u) {
  switch (d.tag) {
    case ParamDomain::Tag::UniverseAll:
      return "UNIVERSE";
    case ParamDomain::Tag::Atoms: {
      std::string out = "{";
      for (size_t i = 0; i < d.atom_indices.size(); ++i) {
        if (i) out += ",";
        out += u.atom_name(d.atom_indices[i]);
      }
      return out + "}";
    }
    case ParamDomain::Tag::NatRange:
      return std::to_string(d.lo) + ".." + std::to_string(d.hi);
    case ParamDomain::Tag::Bools:
      return "BOOL";
  }
  return "?";
}

std::string infix(const Expr& e, const Universe& u, const char* op) {
  return "(" + expr_to_string(*e.kids[0], u) + " " + op + " " + expr_to_string(*e.kids[1], u) + ")";
}

std::string call2(const Expr& e, const Universe& u, const char* fn) {
  return std::string(fn) + "(" + expr_to_string(*e.kids[0], u) + ", " +
         expr_to_string(*e.kids[1], u) + ")";
}

}  // namespace

std::string expr_to_string(const Expr& e, const Universe& u) {
  switch (e.op) {
    case ExprOp::NatLit:
      return std::to_string(e.nat_value);
    case ExprOp::BoolLit:
      return e.bool_value ? "true" : "false";
    case ExprOp::AtomLit:
      return u.atom_name(e.atom_index);
    case ExprOp::SetLit: {
      std::string out = "{";
      for (size_t i = 0; i < e.kids.size(); ++i) {
        if (i) out += ",";
        out += expr_to_string(*e.kids[i], u);
      }
      return out + "}";
    }
    case ExprOp::Var:
      return e.name;
    case ExprOp::Union:
      return call2(e, u, "union");
    case ExprOp::Inter:
      return call2(e, u, "inter");
    case ExprOp::Diff:
      return call2(e, u, "diff");
    case ExprOp::Card:
      return "card(" + expr_to_string(*e.kids[0], u) + ")";
    case ExprOp::Add:
      return infix(e, u, "+");
    case ExprOp::Sub:
      return infix(e, u, "-");
    case ExprOp::Eq:
      return infix(e, u, "=");
    case ExprOp::Le:
      return infix(e, u, "<=");
    case ExprOp::Lt:
      return infix(e, u, "<");
    case ExprOp::In:
      return infix(e, u, "in");
    case ExprOp::Subset:
      return infix(e, u, "subset");
    case ExprOp::And:
      return infix(e, u, "and");
    case ExprOp::Or:
      return infix(e, u, "or");
    case ExprOp::Implies:
      return infix(e, u, "=>");
    case ExprOp::Not:
      return "not " + expr_to_string(*e.kids[0], u);
    case ExprOp::Forall:
      return "(forall " + e.name + " : " + domain_to_string(e.domain, u) + " . " +
             expr_to_string(*e.kids[0], u) + ")";
    case ExprOp::Exists:
      return "(exists " + e.name + " : " + domain_to_string(e.domain, u) + " . " +
             expr_to_string(*e.kids[0], u) + ")";
  }
  return "?";
}

}  // namespace subst
