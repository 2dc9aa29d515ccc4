#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "subst/exec.hpp"

using namespace subst;
using namespace subst::testing;

namespace {

const CommerceConfig kFive{};  // 5 products, purchase everything

uint64_t bit(const Universe& u, const char* name) {
  return uint64_t{1} << u.require_index(name);
}

}  // namespace

TEST_CASE("eval: cardinality of a set union collapses duplicates") {
  Universe u = product_universe(5);
  Machine m;
  m.universe = u;
  ExprPtr e = ex::card(ex::union_(ex::set_const(mask_of(u, {"Prod1", "Prod2"})),
                                  ex::set_const(mask_of(u, {"Prod2", "Prod3"}))));
  CHECK(eval(m, Valuation{}, *e).as_nat() == 3);
}

TEST_CASE("eval: cardinality difference variant over a five-atom universe") {
  auto [m, sys1] = build_m11(kFive);
  Valuation v = with_slot(m, initialize(m), "C1",
                          Value::set(mask_of(m.universe, {"Prod1", "Prod2"})));
  CHECK(eval_nat(m, v, *sys1.variant) == 3);
}

TEST_CASE("eval: universally quantified predicate over an empty domain is true") {
  Machine m = tiny_machine(0, 10);
  ExprPtr e = ex::forall("p", ParamDomain::atoms({}), ex::boolean(false));
  CHECK(eval_pred(m, initialize(m), *e));
}

TEST_CASE("eval: natural subtraction floors at zero") {
  Machine m = tiny_machine(2, 10);
  ExprPtr e = ex::sub(ex::var("x"), ex::nat(5));
  CHECK(eval_nat(m, initialize(m), *e) == 0);
  ExprPtr e2 = ex::sub(ex::nat(5), ex::var("x"));
  CHECK(eval_nat(m, initialize(m), *e2) == 3);
}

TEST_CASE("eval: equality across different sorts is a sort error") {
  Machine m = tiny_machine(0, 10);
  ExprPtr e = ex::eq(ex::var("x"), ex::boolean(true));
  CHECK_THROWS_AS(eval(m, initialize(m), *e), SortError);
}

TEST_CASE("eval: undeclared variable reference fails") {
  Machine m = tiny_machine(0, 10);
  ExprPtr e = ex::var("nope");
  CHECK_THROWS_AS(eval(m, initialize(m), *e), UnboundVariableError);
}

TEST_CASE("eval: innermost binding shadows a declared variable") {
  Machine m = tiny_machine(7, 10);
  Valuation v = initialize(m);
  Env env = Env::of(m, v);
  env.bind("x", Value::nat(1));
  CHECK(eval(*ex::var("x"), env).as_nat() == 1);
  env.unbind();
  CHECK(eval(*ex::var("x"), env).as_nat() == 7);
}

TEST_CASE("variant_value: one-cart system counts the products still missing") {
  auto [m, sys1] = build_m11(kFive);
  CHECK(variant_value(m, sys1, initialize(m)) == 5);
}

TEST_CASE("variant_value: two-cart system measures the union of both carts") {
  auto [m, sys2] = build_m12(kFive);
  const Universe& u = m.universe;
  Valuation v = initialize(m);
  v = with_slot(m, v, "C2a", Value::set(mask_of(u, {"Prod1"})));
  v = with_slot(m, v, "C2b", Value::set(mask_of(u, {"Prod2", "Prod3"})));
  CHECK(variant_value(m, sys2, v) == 2);

  // Overlapping carts: the union has one member, so 5 - 1. Oracle computed
  // directly on the bitmasks.
  uint64_t a = mask_of(u, {"Prod1"}), b = mask_of(u, {"Prod1"});
  v = with_slot(m, v, "C2a", Value::set(a));
  v = with_slot(m, v, "C2b", Value::set(b));
  uint64_t expect = 5 - static_cast<uint64_t>(__builtin_popcountll(a | b));
  CHECK(variant_value(m, sys2, v) == expect);
  CHECK(variant_value(m, sys2, v) == 4);
}

TEST_CASE("initialize: carts start empty and the completion flag is down") {
  auto [m11, sys1] = build_m11(kFive);
  Valuation v = initialize(m11);
  CHECK(slot(m11, v, "C1") == Value::set(0));
  CHECK(slot(m11, v, "selection_done") == Value::boolean(false));

  auto [m12, sys2] = build_m12(kFive);
  Valuation w = initialize(m12);
  CHECK(slot(m12, w, "C2a") == Value::set(0));
  CHECK(slot(m12, w, "C2b") == Value::set(0));
}

TEST_CASE("initialize: an init state breaking an invariant is rejected") {
  Machine m = tiny_machine(5, 10, {ex::le(ex::var("x"), ex::nat(3))});
  CHECK_THROWS_AS(initialize(m), InitViolatesInvariantError);
}

TEST_CASE("enabled: every product is selectable from an empty cart") {
  auto [m, sys1] = build_m11(kFive);
  const Universe& u = m.universe;
  Valuation v = initialize(m);
  std::vector<EnabledEvent> en = enabled(m, v);

  // Oracle: brute-force the guard p in P and p not in C1 on the bitmasks.
  uint64_t c1 = slot(m, v, "C1").as_set();
  std::vector<uint32_t> expect;
  for (uint32_t p = 0; p < u.size(); ++p)
    if ((c1 & (uint64_t{1} << p)) == 0) expect.push_back(p);

  REQUIRE(en.size() == expect.size());
  REQUIRE(en.size() == 5);
  for (size_t i = 0; i < en.size(); ++i) {
    CHECK(m.events[en[i].event].name == "select1");
    CHECK(en[i].binding == Binding{Value::atom(expect[i])});
  }
}

TEST_CASE("enabled: a full cart disables selection and enables finish") {
  auto [m, sys1] = build_m11(kFive);
  Valuation v = with_slot(m, initialize(m), "C1", Value::set(m.universe.full_mask()));
  std::vector<EnabledEvent> en = enabled(m, v);
  REQUIRE(en.size() == 1);
  CHECK(m.events[en[0].event].name == "finish1");
  CHECK(en[0].binding.empty());
}

TEST_CASE("enabled: a machine without events enables nothing") {
  Machine m = tiny_machine(0, 10);
  CHECK(enabled(m, initialize(m)).empty());
}

TEST_CASE("enabled: occurrences come in declaration order, bindings lexicographic") {
  auto [m, sys2] = build_m12(kFive);
  std::vector<EnabledEvent> en = enabled(m, initialize(m));
  REQUIRE(en.size() == 10);  // select2a and select2b over 5 products each
  for (size_t i = 1; i < en.size(); ++i) {
    CHECK(en[i - 1].event <= en[i].event);
    if (en[i - 1].event == en[i].event)
      CHECK(value_less(en[i - 1].binding[0], en[i].binding[0]));
  }
  CHECK(enabled(m, initialize(m)) == en);
}

TEST_CASE("step: selecting a product adds it to the cart and nothing else") {
  auto [m, sys1] = build_m11(kFive);
  const Universe& u = m.universe;
  Valuation v = with_slot(m, initialize(m), "C1", Value::set(bit(u, "Prod1")));
  Valuation w = step(m, v, "select1", {Value::atom(u.require_index("Prod2"))});
  CHECK(slot(m, w, "C1") == Value::set(mask_of(u, {"Prod1", "Prod2"})));
  CHECK(slot(m, w, "selection_done") == slot(m, v, "selection_done"));
}

TEST_CASE("step: firing a disabled event is an error") {
  auto [m, sys1] = build_m11(kFive);
  const Universe& u = m.universe;
  Valuation v = with_slot(m, initialize(m), "C1", Value::set(bit(u, "Prod1")));
  CHECK_THROWS_AS(step(m, v, "select1", {Value::atom(u.require_index("Prod1"))}),
                  GuardFalseError);
  CHECK_THROWS_AS(step(m, v, "nosuch", {}), UnknownEventError);
}

TEST_CASE("step: assignments apply in parallel") {
  Machine m;
  m.name = "swap";
  m.universe = Universe({"a"});
  m.vars = {{"x", Kind::Nat, 9}, {"y", Kind::Nat, 9}};
  m.init.slots = {Value::nat(1), Value::nat(2)};
  GuardedEvent swap;
  swap.name = "swap";
  swap.guard = ex::boolean(true);
  swap.assigns = {{0, ex::var("y")}, {1, ex::var("x")}};
  m.events = {swap};
  validate(m);

  Valuation w = step(m, initialize(m), "swap", {});
  CHECK(w.slots[0] == Value::nat(2));
  CHECK(w.slots[1] == Value::nat(1));
}

TEST_CASE("step: a nat assignment past its declared bound is a domain error") {
  Machine m;
  m.name = "inc";
  m.universe = Universe({"a"});
  m.vars = {{"x", Kind::Nat, 3}};
  m.init.slots = {Value::nat(3)};
  GuardedEvent inc;
  inc.name = "inc";
  inc.guard = ex::boolean(true);
  inc.assigns = {{0, ex::add(ex::var("x"), ex::nat(1))}};
  m.events = {inc};
  validate(m);
  CHECK_THROWS_AS(step(m, initialize(m), "inc", {}), DomainError);
}

TEST_CASE("step: the frame property holds on the composed machine") {
  Machine m = build_m13(kFive);
  const Universe& u = m.universe;
  Valuation v = initialize(m);
  Valuation w = step(m, v, "select1", {Value::atom(u.require_index("Prod3"))});
  for (uint32_t i = 0; i < m.vars.size(); ++i)
    if (m.vars[i].name != "C1") CHECK(w.slots[i] == v.slots[i]);
}

TEST_CASE("canonical order: a set precedes every proper subset of itself") {
  Universe u = product_universe(5);
  Value s13 = Value::set(mask_of(u, {"Prod1", "Prod3"}));
  Value s1 = Value::set(mask_of(u, {"Prod1"}));
  Value s3 = Value::set(mask_of(u, {"Prod3"}));
  Value empty = Value::set(0);
  CHECK(value_less(s13, s1));
  CHECK(value_less(s1, s3));
  CHECK(value_less(s3, empty));
  CHECK(value_less(s13, empty));
  CHECK_FALSE(value_less(s1, s13));
  CHECK_FALSE(value_less(empty, empty));
}

TEST_CASE("canonical order: full universe first, empty set last") {
  Universe u = product_universe(5);
  std::vector<Value> all;
  for (uint64_t mask = 0; mask < 32; ++mask) all.push_back(Value::set(mask));
  std::sort(all.begin(), all.end(), value_less);
  CHECK(all.front() == Value::set(u.full_mask()));
  CHECK(all.back() == Value::set(0));

  // Strict total order: adjacent sorted elements are strictly increasing.
  for (size_t i = 1; i < all.size(); ++i) {
    CHECK(value_less(all[i - 1], all[i]));
    CHECK_FALSE(value_less(all[i], all[i - 1]));
  }
}

TEST_CASE("canonical order: nat, bool, and atom compare naturally") {
  CHECK(value_less(Value::nat(1), Value::nat(2)));
  CHECK(value_less(Value::boolean(false), Value::boolean(true)));
  CHECK(value_less(Value::atom(0), Value::atom(3)));
  CHECK_FALSE(value_less(Value::nat(2), Value::nat(2)));
}

TEST_CASE("canonical order: valuations compare slot-wise in declaration order") {
  Valuation a{{Value::nat(1), Value::boolean(false)}};
  Valuation b{{Value::nat(1), Value::boolean(true)}};
  Valuation c{{Value::nat(2), Value::boolean(false)}};
  CHECK(valuation_less(a, b));
  CHECK(valuation_less(b, c));
  CHECK(valuation_less(a, c));
  CHECK_FALSE(valuation_less(a, a));
}

TEST_CASE("validate: overlapping system variable groups are rejected") {
  auto [m, sys1] = build_m11(kFive);
  SystemDef clash{"Sys9", sys1.vars, sys1.variant};
  m.systems.push_back(clash);
  CHECK_THROWS_AS(validate(m), ValidationError);
}

TEST_CASE("attribute_events: footprint assigns each event to at most one system") {
  Machine m = build_m13(kFive);
  auto owners = attribute_events(m);
  REQUIRE(owners.size() == m.events.size());
  uint32_t sys1 = *m.system_index("Sys1");
  uint32_t sys2 = *m.system_index("Sys2");
  CHECK(owners[*m.event_index("select1")] == sys1);
  CHECK(owners[*m.event_index("select2a")] == sys2);
  CHECK(owners[*m.event_index("select2b")] == sys2);
  // The finish guards read their system's carts, so each finish is owned too.
  CHECK(owners[*m.event_index("finish1")] == sys1);
  CHECK(owners[*m.event_index("finish2")] == sys2);
}

TEST_CASE("attribute_events: an event spanning two systems is rejected") {
  Machine m = build_m13(kFive);
  GuardedEvent bridge;
  bridge.name = "bridge";
  bridge.guard = ex::eq(ex::var("C1"), ex::var("C2a"));
  m.events.push_back(bridge);
  CHECK_THROWS_AS(attribute_events(m), ValidationError);
}

namespace {

// Hand-rolled generator of well-sorted expressions for the totality property.
struct ExprGen {
  std::mt19937_64 rng;
  const Universe& u;

  uint64_t pick(uint64_t n) { return rng() % n; }

  ExprPtr gen(Kind kind, int depth) {
    if (depth <= 0) return leaf(kind);
    switch (kind) {
      case Kind::Nat:
        switch (pick(4)) {
          case 0: return leaf(Kind::Nat);
          case 1: return ex::add(gen(Kind::Nat, depth - 1), gen(Kind::Nat, depth - 1));
          case 2: return ex::sub(gen(Kind::Nat, depth - 1), gen(Kind::Nat, depth - 1));
          default: return ex::card(gen(Kind::Set, depth - 1));
        }
      case Kind::Bool:
        switch (pick(8)) {
          case 0: return leaf(Kind::Bool);
          case 1: {
            Kind k = pick(2) ? Kind::Nat : Kind::Set;
            return ex::eq(gen(k, depth - 1), gen(k, depth - 1));
          }
          case 2: return ex::le(gen(Kind::Nat, depth - 1), gen(Kind::Nat, depth - 1));
          case 3: return ex::in(leaf(Kind::Atom), gen(Kind::Set, depth - 1));
          case 4: return ex::subset(gen(Kind::Set, depth - 1), gen(Kind::Set, depth - 1));
          case 5: return ex::and_(gen(Kind::Bool, depth - 1), gen(Kind::Bool, depth - 1));
          case 6: return ex::not_(gen(Kind::Bool, depth - 1));
          default: {
            ParamDomain dom = pick(2) ? ParamDomain::universe_all()
                                      : ParamDomain::nat_range(0, pick(3));
            std::string binder = "q" + std::to_string(pick(2));
            Kind bk = dom.element_kind();
            bound.push_back({binder, bk});
            ExprPtr body = gen(Kind::Bool, depth - 1);
            bound.pop_back();
            auto q = pick(2) ? ex::forall : ex::exists;
            return q(binder, dom, body);
          }
        }
      case Kind::Set:
        switch (pick(4)) {
          case 0: return leaf(Kind::Set);
          case 1: return ex::union_(gen(Kind::Set, depth - 1), gen(Kind::Set, depth - 1));
          case 2: return ex::inter(gen(Kind::Set, depth - 1), gen(Kind::Set, depth - 1));
          default: return ex::diff(gen(Kind::Set, depth - 1), gen(Kind::Set, depth - 1));
        }
      case Kind::Atom:
        return leaf(Kind::Atom);
    }
    return leaf(kind);
  }

  ExprPtr leaf(Kind kind) {
    // Prefer a bound or declared variable of the right kind when one exists.
    if (pick(2) == 0) {
      for (auto it = bound.rbegin(); it != bound.rend(); ++it)
        if (it->second == kind) return ex::var(it->first);
      for (const auto& [name, k] : vars)
        if (k == kind) return ex::var(name);
    }
    switch (kind) {
      case Kind::Nat: return ex::nat(pick(8));
      case Kind::Bool: return ex::boolean(pick(2) != 0);
      case Kind::Set: return ex::set_const(pick(u.full_mask() + 1));
      case Kind::Atom: return ex::atom(static_cast<uint32_t>(pick(u.size())));
    }
    return ex::nat(0);
  }

  std::vector<std::pair<std::string, Kind>> vars;   // declared machine variables
  std::vector<std::pair<std::string, Kind>> bound;  // quantifier binders in scope
};

}  // namespace

TEST_CASE("eval: total on randomly generated well-sorted expressions") {
  Machine m;
  m.name = "gen";
  m.universe = product_universe(5);
  m.vars = {{"n1", Kind::Nat, 10}, {"b1", Kind::Bool, 0}, {"s1", Kind::Set, 0},
            {"s2", Kind::Set, 0}};
  m.init.slots = {Value::nat(0), Value::boolean(false), Value::set(0), Value::set(0)};
  validate(m);

  for (uint64_t seed = 0; seed < 200; ++seed) {
    CAPTURE(seed);
    ExprGen gen{std::mt19937_64(seed), m.universe, {}, {}};
    for (const VarDecl& d : m.vars) gen.vars.emplace_back(d.name, d.kind);
    Kind want = std::array{Kind::Nat, Kind::Bool, Kind::Set}[seed % 3];
    ExprPtr e = gen.gen(want, 4);

    SortEnv env = m.var_sorts();
    CHECK(sort_of(*e, env) == want);

    Valuation v;
    v.slots = {Value::nat(gen.pick(11)), Value::boolean(gen.pick(2) != 0),
               Value::set(gen.pick(32)), Value::set(gen.pick(32))};
    Value out = eval(m, v, *e);
    CHECK(out.kind == want);
    if (want == Kind::Set) CHECK((out.raw & ~m.universe.full_mask()) == 0);
    CHECK(eval(m, v, *e) == out);
  }
}
