#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "subst/scenario.hpp"

using namespace subst;
using namespace subst::testing;

namespace {

const CommerceConfig kFive{};

CommerceConfig with_products(uint32_t n) {
  CommerceConfig c;
  c.products = n;
  return c;
}

}  // namespace

TEST_CASE("product_universe: named atoms within the supported range") {
  Universe u = product_universe(3);
  REQUIRE(u.size() == 3);
  CHECK(u.atom_name(0) == "Prod1");
  CHECK(u.atom_name(2) == "Prod3");
  CHECK_THROWS_AS(product_universe(0), ConfigError);
  CHECK_THROWS_AS(product_universe(65), ConfigError);
  CHECK(product_universe(64).size() == 64);
}

TEST_CASE("builders: a purchase outside the universe is rejected") {
  CommerceConfig c = with_products(3);
  c.purchase = 0b1000;  // fourth product does not exist
  CHECK_THROWS_AS(build_m1(c), ConfigError);
}

TEST_CASE("builders: every machine validates and starts cleanly") {
  for (const std::string& name : scenario_names()) {
    CAPTURE(name);
    Scenario s = make_scenario(name, kFive, Mutant::None);
    validate(s.machine);
    Valuation v = initialize(s.machine);
    CHECK_FALSE(violated_invariant(s.machine, v).has_value());
    attribute_events(s.machine);
    if (!s.initial_active.empty())
      CHECK(s.machine.system_index(s.initial_active).has_value());
  }
}

TEST_CASE("builders: composed machines have no switch event") {
  for (const char* name : {"m13", "m141", "m142"}) {
    Scenario s = make_scenario(name, kFive, Mutant::None);
    CHECK(s.machine.events.size() == 5);
    CHECK_FALSE(s.machine.event_index("switch").has_value());
  }
}

TEST_CASE("builders: state counts scale with the product parameter") {
  // One cart: 2^n subsets, plus the one finished state.
  CHECK(reachable(build_m11(with_products(3)).first).states.size() == 9);
  // Two carts: 3^n disjoint pairs, plus 2^n finished covering splits.
  CHECK(reachable(build_m12(with_products(3)).first).states.size() == 35);
  // Composition: products of the above, finished states deduplicated.
  CHECK(reachable(build_m13(with_products(3))).states.size() == 299);
  CHECK(reachable(build_m11(with_products(1)).first).states.size() == 3);
}

TEST_CASE("builders: a strict purchase subset shrinks the space") {
  CommerceConfig c = with_products(4);
  c.purchase = 0b0101;  // Prod1 and Prod3
  auto [m, sys1] = build_m11(c);
  ExploreResult r = reachable(m);
  CHECK(r.states.size() == 5);  // 4 subsets of P plus the finished state
  for (const Valuation& v : r.states)
    CHECK((slot(m, v, "C1").as_set() & ~*c.purchase) == 0);
}

TEST_CASE("safety: completion and uniqueness hold on every reachable state") {
  auto [m12, sys2] = build_m12(kFive);
  for (const Valuation& v : reachable(m12).states) {
    uint64_t a = slot(m12, v, "C2a").as_set(), b = slot(m12, v, "C2b").as_set();
    CHECK((a & b) == 0);
    if (slot(m12, v, "selection_done").as_bool())
      CHECK((a | b) == m12.universe.full_mask());
  }

  Machine m13 = build_m13(kFive);
  for (const Valuation& v : reachable(m13).states) {
    uint64_t a = slot(m13, v, "C2a").as_set(), b = slot(m13, v, "C2b").as_set();
    CHECK((a & b) == 0);
    if (slot(m13, v, "selection_done").as_bool()) {
      bool one_done = slot(m13, v, "C1").as_set() == m13.universe.full_mask() ||
                      (a | b) == m13.universe.full_mask();
      CHECK(one_done);
    }
  }
}

TEST_CASE("registry: the scenario list is fixed and closed") {
  CHECK(scenario_names() ==
        std::vector<std::string>{"m1", "m11", "m12", "m13", "m141", "m142"});
  CHECK_THROWS_AS(make_scenario("m99", kFive, Mutant::None), ConfigError);
}

TEST_CASE("registry: scenario wiring matches the machine family") {
  Scenario s11 = make_scenario("m11", kFive, Mutant::None);
  CHECK(s11.initial_active == "Sys1");
  CHECK(s11.refinements.size() == 1);
  CHECK_FALSE(s11.cfg.has_value());

  Scenario s12 = make_scenario("m12", kFive, Mutant::None);
  CHECK(s12.initial_active == "Sys2");

  Scenario s141 = make_scenario("m141", kFive, Mutant::None);
  REQUIRE(s141.cfg.has_value());
  CHECK(s141.cfg->policy == Policy::Cold);
  CHECK(s141.cfg->source == "Sys1");
  CHECK(s141.cfg->target == "Sys2");
  CHECK_FALSE(s141.cfg->hinv.has_value());

  Scenario s142 = make_scenario("m142", kFive, Mutant::None);
  REQUIRE(s142.cfg.has_value());
  CHECK(s142.cfg->policy == Policy::Hot);
  CHECK(s142.cfg->trigger.tag == Trigger::Tag::AtStep);
  CHECK(s142.cfg->trigger.at_step == 3);
  REQUIRE(s142.cfg->hinv.has_value());
  CHECK(expr_to_string(*s142.cfg->hinv->pred, s142.machine.universe) ==
        "(C1 = union(C2a, C2b))");
}

TEST_CASE("registry: mutants apply only where they are defined") {
  CHECK_THROWS_AS(make_scenario("m1", kFive, Mutant::NonDecreasingSelect), ConfigError);
  CHECK_THROWS_AS(make_scenario("m11", kFive, Mutant::DropDisjointnessGuard),
                  ConfigError);
  CHECK_THROWS_AS(make_scenario("m12", kFive, Mutant::NonDecreasingSelect), ConfigError);
  CHECK_THROWS_AS(make_scenario("m141", kFive, Mutant::HinvFalse), ConfigError);
  CHECK_THROWS_AS(make_scenario("m13", kFive, Mutant::HinvFalse), ConfigError);

  make_scenario("m11", kFive, Mutant::NonDecreasingSelect);
  make_scenario("m12", kFive, Mutant::DropDisjointnessGuard);
  make_scenario("m13", kFive, Mutant::DropDisjointnessGuard);
  make_scenario("m141", kFive, Mutant::NonDecreasingSelect);
  make_scenario("m142", kFive, Mutant::HinvFalse);
}

TEST_CASE("registry: name tables round-trip") {
  for (const std::string& n : mutant_names()) {
    auto m = mutant_from_name(n);
    REQUIRE(m.has_value());
    CHECK(mutant_name(*m) == n);
  }
  CHECK_FALSE(mutant_from_name("nosuch").has_value());
  CHECK(mutant_names() == std::vector<std::string>{"drop-disjointness-guard",
                                                   "non-decreasing-select", "hinv-false"});

  for (Policy p : {Policy::Cold, Policy::Warm, Policy::Hot})
    CHECK(policy_from_name(policy_name(p)) == p);
  CHECK_FALSE(policy_from_name("tepid").has_value());
}

TEST_CASE("mutants: each seeded defect changes exactly its advertised guard") {
  // Dropped disjointness: select2a no longer checks the sibling cart.
  auto [good, gs] = build_m12(kFive);
  auto [bad, bs] = build_m12(kFive, Mutant::DropDisjointnessGuard);
  Valuation v = initialize(good);
  v = with_slot(good, v, "C2b", Value::set(mask_of(good.universe, {"Prod1"})));
  Binding p1{Value::atom(0)};
  CHECK_FALSE(guard_holds(good, v, good.events[*good.event_index("select2a")], p1));
  CHECK(guard_holds(bad, v, bad.events[*bad.event_index("select2a")], p1));

  // Non-decreasing select: select1 no longer excludes selected products.
  auto [g11, s11] = build_m11(kFive);
  auto [b11, t11] = build_m11(kFive, Mutant::NonDecreasingSelect);
  Valuation w = with_slot(g11, initialize(g11), "C1",
                          Value::set(mask_of(g11.universe, {"Prod1"})));
  CHECK_FALSE(guard_holds(g11, w, g11.events[*g11.event_index("select1")], p1));
  CHECK(guard_holds(b11, w, b11.events[*b11.event_index("select1")], p1));

  // False horizontal invariant: the machine itself is untouched.
  auto [hm, hcfg] = build_m142(kFive, Mutant::HinvFalse);
  auto [nm, ncfg] = build_m142(kFive);
  CHECK(machine_to_json(hm).dump() == machine_to_json(nm).dump());
  CHECK(expr_to_string(*hcfg.hinv->pred, hm.universe) == "false");
}
