#include "subst/commerce.hpp"

#include <algorithm>

namespace subst {

const char* mutant_name(Mutant m) {
  switch (m) {
    case Mutant::None:
      return "none";
    case Mutant::DropDisjointnessGuard:
      return "drop-disjointness-guard";
    case Mutant::NonDecreasingSelect:
      return "non-decreasing-select";
    case Mutant::HinvFalse:
      return "hinv-false";
  }
  return "unknown";
}

std::optional<Mutant> mutant_from_name(std::string_view name) {
  for (Mutant m : {Mutant::DropDisjointnessGuard, Mutant::NonDecreasingSelect,
                   Mutant::HinvFalse})
    if (name == mutant_name(m)) return m;
  return std::nullopt;
}

std::vector<std::string> mutant_names() {
  return {"drop-disjointness-guard", "non-decreasing-select", "hinv-false"};
}

Universe product_universe(uint32_t n) {
  if (n < 1 || n > 64) throw ConfigError("product count must be between 1 and 64");
  std::vector<std::string> atoms;
  atoms.reserve(n);
  for (uint32_t i = 1; i <= n; ++i) atoms.push_back("Prod" + std::to_string(i));
  return Universe(std::move(atoms));
}

namespace {

// Shared pieces of every builder: the universe, the purchase set P, and the
// literal for the whole universe.
struct Ctx {
  Universe universe;
  uint64_t purchase = 0;

  ExprPtr P() const { return ex::set_const(purchase); }
  ExprPtr all() const { return ex::set_const(universe.full_mask()); }
};

Ctx make_ctx(const CommerceConfig& cfg) {
  Ctx ctx;
  ctx.universe = product_universe(cfg.products);
  ctx.purchase = cfg.purchase.value_or(ctx.universe.full_mask());
  if (ctx.purchase & ~ctx.universe.full_mask())
    throw ConfigError("purchase set contains atoms outside the universe");
  return ctx;
}

// Guard of a selection event: p is still wanted and not yet in any of the
// listed carts; selection is not finished. Mutants drop one conjunct.
ExprPtr select_guard(const Ctx& ctx, const std::vector<std::string>& carts) {
  std::vector<ExprPtr> conj{ex::in(ex::var("p"), ctx.P())};
  for (const std::string& cart : carts)
    conj.push_back(ex::not_(ex::in(ex::var("p"), ex::var(cart))));
  conj.push_back(ex::not_(ex::var("selection_done")));
  return ex::all_of(std::move(conj));
}

ExprPtr cart_complete(ExprPtr cart_union, const Ctx& ctx) {
  return ex::eq(std::move(cart_union), ctx.P());
}

}  // namespace

Machine build_m1(const CommerceConfig& cfg) {
  Ctx ctx = make_ctx(cfg);
  Machine m;
  m.name = "m1";
  m.universe = ctx.universe;
  m.vars = {{"cart", Kind::Set, 0}, {"selection_done", Kind::Bool, 0}};
  m.init.slots = {Value::set(0), Value::boolean(false)};
  m.invariants = {ex::subset(ex::var("cart"), ctx.P()),
                  ex::implies(ex::var("selection_done"),
                              ex::eq(ex::var("cart"), ctx.P()))};
  m.variant = ex::sub(ex::card(ctx.all()), ex::card(ex::var("cart")));

  GuardedEvent select;
  select.name = "select";
  select.params.push_back({"p", ParamDomain::universe_all()});
  select.guard = select_guard(ctx, {"cart"});
  select.assigns.push_back({0, ex::union_(ex::var("cart"), ex::set_of({ex::var("p")}))});
  select.convergent = true;

  GuardedEvent finish;
  finish.name = "finish";
  finish.guard = ex::and_(cart_complete(ex::var("cart"), ctx),
                          ex::not_(ex::var("selection_done")));
  finish.assigns.push_back({1, ex::boolean(true)});

  m.events = {std::move(select), std::move(finish)};
  validate(m);
  return m;
}

std::pair<Machine, SystemDef> build_m11(const CommerceConfig& cfg, Mutant mutant) {
  Ctx ctx = make_ctx(cfg);
  Machine m;
  m.name = "m11";
  m.universe = ctx.universe;
  m.vars = {{"C1", Kind::Set, 0}, {"selection_done", Kind::Bool, 0}};
  m.init.slots = {Value::set(0), Value::boolean(false)};
  m.invariants = {ex::subset(ex::var("C1"), ctx.P()),
                  ex::implies(ex::var("selection_done"),
                              ex::eq(ex::var("C1"), ctx.P()))};

  GuardedEvent select1;
  select1.name = "select1";
  select1.params.push_back({"p", ParamDomain::universe_all()});
  select1.guard = mutant == Mutant::NonDecreasingSelect ? select_guard(ctx, {})
                                                        : select_guard(ctx, {"C1"});
  select1.assigns.push_back({0, ex::union_(ex::var("C1"), ex::set_of({ex::var("p")}))});
  select1.convergent = true;

  GuardedEvent finish1;
  finish1.name = "finish1";
  finish1.guard = ex::and_(cart_complete(ex::var("C1"), ctx),
                           ex::not_(ex::var("selection_done")));
  finish1.assigns.push_back({1, ex::boolean(true)});

  m.events = {std::move(select1), std::move(finish1)};

  SystemDef sys1;
  sys1.id = "Sys1";
  sys1.vars = {0};
  sys1.variant = ex::sub(ex::card(ctx.all()), ex::card(ex::var("C1")));
  m.systems = {sys1};
  validate(m);
  return {std::move(m), std::move(sys1)};
}

std::pair<Machine, SystemDef> build_m12(const CommerceConfig& cfg, Mutant mutant) {
  Ctx ctx = make_ctx(cfg);
  Machine m;
  m.name = "m12";
  m.universe = ctx.universe;
  m.vars = {{"C2a", Kind::Set, 0}, {"C2b", Kind::Set, 0},
            {"selection_done", Kind::Bool, 0}};
  m.init.slots = {Value::set(0), Value::set(0), Value::boolean(false)};
  ExprPtr site_union = ex::union_(ex::var("C2a"), ex::var("C2b"));
  m.invariants = {ex::eq(ex::inter(ex::var("C2a"), ex::var("C2b")), ex::set_const(0)),
                  ex::subset(site_union, ctx.P()),
                  ex::implies(ex::var("selection_done"), ex::eq(site_union, ctx.P()))};

  GuardedEvent select2a;
  select2a.name = "select2a";
  select2a.params.push_back({"p", ParamDomain::universe_all()});
  select2a.guard = mutant == Mutant::DropDisjointnessGuard
                       ? select_guard(ctx, {"C2a"})
                       : select_guard(ctx, {"C2a", "C2b"});
  select2a.assigns.push_back({0, ex::union_(ex::var("C2a"), ex::set_of({ex::var("p")}))});
  select2a.convergent = true;

  GuardedEvent select2b;
  select2b.name = "select2b";
  select2b.params.push_back({"p", ParamDomain::universe_all()});
  select2b.guard = select_guard(ctx, {"C2b", "C2a"});
  select2b.assigns.push_back({1, ex::union_(ex::var("C2b"), ex::set_of({ex::var("p")}))});
  select2b.convergent = true;

  GuardedEvent finish2;
  finish2.name = "finish2";
  finish2.guard = ex::and_(cart_complete(site_union, ctx),
                           ex::not_(ex::var("selection_done")));
  finish2.assigns.push_back({2, ex::boolean(true)});

  m.events = {std::move(select2a), std::move(select2b), std::move(finish2)};

  SystemDef sys2;
  sys2.id = "Sys2";
  sys2.vars = {0, 1};
  sys2.variant = ex::sub(ex::card(ctx.all()), ex::card(site_union));
  m.systems = {sys2};
  validate(m);
  return {std::move(m), std::move(sys2)};
}

Machine build_m13(const CommerceConfig& cfg, Mutant mutant) {
  Ctx ctx = make_ctx(cfg);
  Machine m;
  m.name = "m13";
  m.universe = ctx.universe;
  m.vars = {{"C1", Kind::Set, 0}, {"C2a", Kind::Set, 0}, {"C2b", Kind::Set, 0},
            {"selection_done", Kind::Bool, 0}};
  m.init.slots = {Value::set(0), Value::set(0), Value::set(0), Value::boolean(false)};
  ExprPtr site_union = ex::union_(ex::var("C2a"), ex::var("C2b"));
  m.invariants = {
      ex::eq(ex::inter(ex::var("C2a"), ex::var("C2b")), ex::set_const(0)),
      ex::subset(ex::var("C1"), ctx.P()),
      ex::subset(site_union, ctx.P()),
      // Whichever system ran, completion means its cart holds exactly P.
      ex::implies(ex::var("selection_done"),
                  ex::or_(ex::eq(ex::var("C1"), ctx.P()), ex::eq(site_union, ctx.P())))};

  GuardedEvent select1;
  select1.name = "select1";
  select1.params.push_back({"p", ParamDomain::universe_all()});
  select1.guard = mutant == Mutant::NonDecreasingSelect ? select_guard(ctx, {})
                                                        : select_guard(ctx, {"C1"});
  select1.assigns.push_back({0, ex::union_(ex::var("C1"), ex::set_of({ex::var("p")}))});
  select1.convergent = true;

  GuardedEvent finish1;
  finish1.name = "finish1";
  finish1.guard = ex::and_(cart_complete(ex::var("C1"), ctx),
                           ex::not_(ex::var("selection_done")));
  finish1.assigns.push_back({3, ex::boolean(true)});

  GuardedEvent select2a;
  select2a.name = "select2a";
  select2a.params.push_back({"p", ParamDomain::universe_all()});
  select2a.guard = mutant == Mutant::DropDisjointnessGuard
                       ? select_guard(ctx, {"C2a"})
                       : select_guard(ctx, {"C2a", "C2b"});
  select2a.assigns.push_back({1, ex::union_(ex::var("C2a"), ex::set_of({ex::var("p")}))});
  select2a.convergent = true;

  GuardedEvent select2b;
  select2b.name = "select2b";
  select2b.params.push_back({"p", ParamDomain::universe_all()});
  select2b.guard = select_guard(ctx, {"C2b", "C2a"});
  select2b.assigns.push_back({2, ex::union_(ex::var("C2b"), ex::set_of({ex::var("p")}))});
  select2b.convergent = true;

  GuardedEvent finish2;
  finish2.name = "finish2";
  finish2.guard = ex::and_(cart_complete(site_union, ctx),
                           ex::not_(ex::var("selection_done")));
  finish2.assigns.push_back({3, ex::boolean(true)});

  m.events = {std::move(select1), std::move(finish1), std::move(select2a),
              std::move(select2b), std::move(finish2)};

  SystemDef sys1;
  sys1.id = "Sys1";
  sys1.vars = {0};
  sys1.variant = ex::sub(ex::card(ctx.all()), ex::card(ex::var("C1")));
  SystemDef sys2;
  sys2.id = "Sys2";
  sys2.vars = {1, 2};
  sys2.variant = ex::sub(ex::card(ctx.all()), ex::card(site_union));
  m.systems = {std::move(sys1), std::move(sys2)};
  validate(m);
  return m;
}

std::pair<Machine, SubstitutionConfig> build_m141(const CommerceConfig& cfg,
                                                  Mutant mutant) {
  Machine m = build_m13(cfg, mutant);
  m.name = "m141";
  SubstitutionConfig sub;
  sub.source = "Sys1";
  sub.target = "Sys2";
  sub.policy = Policy::Cold;
  sub.trigger = Trigger::at(3);
  validate_config(m, sub);
  return {std::move(m), std::move(sub)};
}

std::pair<Machine, SubstitutionConfig> build_m142(const CommerceConfig& cfg,
                                                  Mutant mutant) {
  Machine m = build_m13(cfg, mutant == Mutant::HinvFalse ? Mutant::None : mutant);
  m.name = "m142";
  SubstitutionConfig sub;
  sub.source = "Sys1";
  sub.target = "Sys2";
  sub.policy = Policy::Hot;
  sub.trigger = Trigger::at(3);
  sub.hinv = HorizontalInvariant{
      mutant == Mutant::HinvFalse
          ? ex::boolean(false)
          : ex::eq(ex::var("C1"), ex::union_(ex::var("C2a"), ex::var("C2b")))};
  validate_config(m, sub);
  return {std::move(m), std::move(sub)};
}

RefinementLink link_m1_m11(const CommerceConfig& cfg, Mutant mutant) {
  RefinementLink link;
  link.abstract = build_m1(cfg);
  link.concrete = build_m11(cfg, mutant).first;
  link.gluing = ex::eq(ex::var("a.cart"), ex::var("c.C1"));
  link.event_map = {{"select1", "select"}, {"finish1", "finish"}};
  return link;
}

RefinementLink link_m1_m12(const CommerceConfig& cfg, Mutant mutant) {
  RefinementLink link;
  link.abstract = build_m1(cfg);
  link.concrete = build_m12(cfg, mutant).first;
  link.gluing =
      ex::eq(ex::var("a.cart"), ex::union_(ex::var("c.C2a"), ex::var("c.C2b")));
  link.event_map = {{"select2a", "select"}, {"select2b", "select"},
                    {"finish2", "finish"}};
  return link;
}

std::vector<std::string> scenario_names() {
  return {"m1", "m11", "m12", "m13", "m141", "m142"};
}

namespace {

void require_mutant(std::string_view scenario, Mutant mutant,
                    std::initializer_list<Mutant> applicable) {
  if (mutant == Mutant::None) return;
  for (Mutant m : applicable)
    if (m == mutant) return;
  throw ConfigError("mutant '" + std::string(mutant_name(mutant)) +
                    "' does not apply to scenario '" + std::string(scenario) + "'");
}

}  // namespace

Scenario make_scenario(std::string_view name, const CommerceConfig& cfg,
                       Mutant mutant) {
  Scenario s;
  s.name = name;
  if (name == "m1") {
    require_mutant(name, mutant, {});
    s.machine = build_m1(cfg);
  } else if (name == "m11") {
    require_mutant(name, mutant, {Mutant::NonDecreasingSelect});
    s.machine = build_m11(cfg, mutant).first;
    s.initial_active = "Sys1";
    s.refinements = {link_m1_m11(cfg, mutant)};
  } else if (name == "m12") {
    require_mutant(name, mutant, {Mutant::DropDisjointnessGuard});
    s.machine = build_m12(cfg, mutant).first;
    s.initial_active = "Sys2";
    s.refinements = {link_m1_m12(cfg, mutant)};
  } else if (name == "m13") {
    require_mutant(name, mutant,
                   {Mutant::DropDisjointnessGuard, Mutant::NonDecreasingSelect});
    s.machine = build_m13(cfg, mutant);
    s.initial_active = "Sys1";
  } else if (name == "m141") {
    require_mutant(name, mutant,
                   {Mutant::DropDisjointnessGuard, Mutant::NonDecreasingSelect});
    auto [machine, sub] = build_m141(cfg, mutant);
    s.machine = std::move(machine);
    s.cfg = std::move(sub);
    s.initial_active = "Sys1";
  } else if (name == "m142") {
    require_mutant(name, mutant,
                   {Mutant::DropDisjointnessGuard, Mutant::NonDecreasingSelect,
                    Mutant::HinvFalse});
    auto [machine, sub] = build_m142(cfg, mutant);
    s.machine = std::move(machine);
    s.cfg = std::move(sub);
    s.initial_active = "Sys1";
  } else {
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
  }
  return s;
}

}  // namespace subst
