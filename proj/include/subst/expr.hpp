#pragma once

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "subst/value.hpp"

namespace subst {

enum class ExprOp : uint8_t {
  NatLit,
  BoolLit,
  AtomLit,
  SetLit,  // set display of atom-sorted elements
  Var,     // declared variable, event parameter, or bound quantifier variable
  Union,
  Inter,
  Diff,
  Card,
  Add,
  Sub,  // natural subtraction, floors at 0
  Eq,   // any sort against the same sort
  Le,
  Lt,
  In,      // atom in set
  Subset,  // set in set
  And,
  Or,
  Implies,
  Not,
  Forall,
  Exists,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// A finite enumeration domain for event parameters and quantifier bindings.
struct ParamDomain {
  enum class Tag : uint8_t { UniverseAll, Atoms, NatRange, Bools };

  Tag tag = Tag::UniverseAll;
  std::vector<uint32_t> atom_indices;  // Atoms: ascending, unique
  uint64_t lo = 0, hi = 0;             // NatRange: inclusive; lo > hi is empty

  static ParamDomain universe_all() { return {Tag::UniverseAll, {}, 0, 0}; }
  static ParamDomain atoms(std::vector<uint32_t> indices);
  static ParamDomain nat_range(uint64_t lo, uint64_t hi) { return {Tag::NatRange, {}, lo, hi}; }
  static ParamDomain bools() { return {Tag::Bools, {}, 0, 0}; }

  Kind element_kind() const;
  // Members in canonical order: atoms ascending, nats ascending, false first.
  std::vector<Value> enumerate(const Universe& u) const;

  bool operator==(const ParamDomain&) const = default;
};

// Immutable AST node. Nodes are shared freely between machines and threads.
struct Expr {
  ExprOp op;
  uint64_t nat_value = 0;   // NatLit
  bool bool_value = false;  // BoolLit
  uint32_t atom_index = 0;  // AtomLit
  std::string name;         // Var reference / quantifier binder
  ParamDomain domain;       // quantifier binder domain
  std::vector<ExprPtr> kids;
};

// Builders. These are the only way the rest of the library constructs ASTs.
namespace ex {

ExprPtr nat(uint64_t n);
ExprPtr boolean(bool b);
ExprPtr atom(uint32_t index);
ExprPtr set_of(std::vector<ExprPtr> elements);
ExprPtr set_const(uint64_t mask);  // set display of the mask's atoms
ExprPtr var(std::string name);

ExprPtr union_(ExprPtr a, ExprPtr b);
ExprPtr inter(ExprPtr a, ExprPtr b);
ExprPtr diff(ExprPtr a, ExprPtr b);
ExprPtr card(ExprPtr s);

ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);

ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr le(ExprPtr a, ExprPtr b);
ExprPtr lt(ExprPtr a, ExprPtr b);
ExprPtr in(ExprPtr element, ExprPtr set);
ExprPtr subset(ExprPtr a, ExprPtr b);

ExprPtr and_(ExprPtr a, ExprPtr b);
ExprPtr or_(ExprPtr a, ExprPtr b);
ExprPtr implies(ExprPtr a, ExprPtr b);
ExprPtr not_(ExprPtr a);
// Conjunction of a list; empty list is true.
ExprPtr all_of(std::vector<ExprPtr> preds);

ExprPtr forall(std::string binder, ParamDomain domain, ExprPtr body);
ExprPtr exists(std::string binder, ParamDomain domain, ExprPtr body);

}  // namespace ex

// Scoped name -> sort environment for the static sort checker.
class SortEnv {
 public:
  void declare(std::string name, Kind kind) { entries_.emplace_back(std::move(name), kind); }
  void pop() { entries_.pop_back(); }
  // Innermost declaration wins.
  std::optional<Kind> lookup(std::string_view name) const;

 private:
  std::vector<std::pair<std::string, Kind>> entries_;
};

// Computes the unique sort of `e`, or throws SortError / UnboundVariableError.
Kind sort_of(const Expr& e, SortEnv& env);
// Convenience: checks that `e` has the given sort in `env`; `where` names the
// construct for error messages.
void require_sort(const Expr& e, Kind expected, SortEnv& env, const std::string& where);

// Free variable names of `e` (bound quantifier variables excluded).
std::set<std::string> free_vars(const Expr& e);

std::string expr_to_string(const Expr& e, const Universe& u);

}  // namespace subst
