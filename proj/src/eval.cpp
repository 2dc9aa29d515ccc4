#include "subst/eval.hpp"

#include <bit>

namespace subst {

Env Env::of(const Machine& m, const Valuation& v) {
  Env env;
  env.universe = &m.universe;
  env.vars = &m.vars;
  env.valuation = &v;
  return env;
}

std::optional<Value> Env::lookup(std::string_view name) const {
  for (auto it = overlay.rbegin(); it != overlay.rend(); ++it)
    if (it->first == name) return it->second;
  if (vars && valuation)
    for (size_t i = 0; i < vars->size(); ++i)
      if ((*vars)[i].name == name) return valuation->slots[i];
  return std::nullopt;
}

namespace {

bool eval_quantifier(const Expr& e, Env& env) {
  bool is_forall = e.op == ExprOp::Forall;
  for (const Value& member : e.domain.enumerate(*env.universe)) {
    env.bind(e.name, member);
    bool holds;
    try {
      holds = eval(*e.kids[0], env).as_bool();
    } catch (...) {
      env.unbind();
      throw;
    }
    env.unbind();
    if (is_forall && !holds) return false;
    if (!is_forall && holds) return true;
  }
  return is_forall;
}

}  // namespace

Value eval(const Expr& e, Env& env) {
  switch (e.op) {
    case ExprOp::NatLit:
      return Value::nat(e.nat_value);
    case ExprOp::BoolLit:
      return Value::boolean(e.bool_value);
    case ExprOp::AtomLit:
      return Value::atom(e.atom_index);
    case ExprOp::SetLit: {
      uint64_t mask = 0;
      for (const auto& k : e.kids) mask |= uint64_t{1} << eval(*k, env).as_atom();
      return Value::set(mask);
    }
    case ExprOp::Var: {
      auto v = env.lookup(e.name);
      if (!v) throw UnboundVariableError("unbound variable '" + e.name + "'");
      return *v;
    }
    case ExprOp::Union:
      return Value::set(eval(*e.kids[0], env).as_set() | eval(*e.kids[1], env).as_set());
    case ExprOp::Inter:
      return Value::set(eval(*e.kids[0], env).as_set() & eval(*e.kids[1], env).as_set());
    case ExprOp::Diff:
      return Value::set(eval(*e.kids[0], env).as_set() & ~eval(*e.kids[1], env).as_set());
    case ExprOp::Card:
      return Value::nat(std::popcount(eval(*e.kids[0], env).as_set()));
    case ExprOp::Add:
      return Value::nat(eval(*e.kids[0], env).as_nat() + eval(*e.kids[1], env).as_nat());
    case ExprOp::Sub: {
      uint64_t a = eval(*e.kids[0], env).as_nat();
      uint64_t b = eval(*e.kids[1], env).as_nat();
      return Value::nat(a > b ? a - b : 0);
    }
    case ExprOp::Eq: {
      Value a = eval(*e.kids[0], env);
      Value b = eval(*e.kids[1], env);
      if (a.kind != b.kind)
        throw SortError(std::string("= compares ") + kind_name(a.kind) + " against " +
                        kind_name(b.kind));
      return Value::boolean(a == b);
    }
    case ExprOp::Le:
      return Value::boolean(eval(*e.kids[0], env).as_nat() <= eval(*e.kids[1], env).as_nat());
    case ExprOp::Lt:
      return Value::boolean(eval(*e.kids[0], env).as_nat() < eval(*e.kids[1], env).as_nat());
    case ExprOp::In: {
      uint32_t a = eval(*e.kids[0], env).as_atom();
      return Value::boolean((eval(*e.kids[1], env).as_set() >> a) & 1);
    }
    case ExprOp::Subset: {
      uint64_t a = eval(*e.kids[0], env).as_set();
      uint64_t b = eval(*e.kids[1], env).as_set();
      return Value::boolean((a & ~b) == 0);
    }
    case ExprOp::And:
      if (!eval(*e.kids[0], env).as_bool()) return Value::boolean(false);
      return Value::boolean(eval(*e.kids[1], env).as_bool());
    case ExprOp::Or:
      if (eval(*e.kids[0], env).as_bool()) return Value::boolean(true);
      return Value::boolean(eval(*e.kids[1], env).as_bool());
    case ExprOp::Implies:
      if (!eval(*e.kids[0], env).as_bool()) return Value::boolean(true);
      return Value::boolean(eval(*e.kids[1], env).as_bool());
    case ExprOp::Not:
      return Value::boolean(!eval(*e.kids[0], env).as_bool());
    case ExprOp::Forall:
    case ExprOp::Exists:
      return Value::boolean(eval_quantifier(e, env));
  }
  throw SortError("unknown expression node");
}

Value eval(const Machine& m, const Valuation& v, const Expr& e) {
  Env env = Env::of(m, v);
  return eval(e, env);
}

bool eval_pred(const Machine& m, const Valuation& v, const Expr& e) {
  return eval(m, v, e).as_bool();
}

uint64_t eval_nat(const Machine& m, const Valuation& v, const Expr& e) {
  return eval(m, v, e).as_nat();
}

std::optional<uint32_t> violated_invariant(const Machine& m, const Valuation& v) {
  for (size_t i = 0; i < m.invariants.size(); ++i)
    if (!eval_pred(m, v, *m.invariants[i])) return static_cast<uint32_t>(i);
  return std::nullopt;
}

}  // namespace subst
