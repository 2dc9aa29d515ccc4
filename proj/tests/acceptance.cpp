#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "subst/commerce.hpp"

// Top-level acceptance gate: one line per criterion, nonzero exit if any
// fails. argv[1] is the substctl binary; library-level criteria run
// in-process, CLI-level criteria run the binary.

using namespace subst;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and bounds, pinned here on purpose.
constexpr double kAllChecksBudgetSeconds = 60.0;
constexpr double kHotSweepBudgetSeconds = 10.0;
constexpr uint64_t kExpectedCarts = 32;    // 2^5 reachable C1 values
constexpr uint64_t kExpectedPairs = 243;   // 3^5 reachable (C2a, C2b) values
constexpr uint32_t kMaxProducts = 5;

int failures = 0;
std::string ctl;

void report(int n, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
  if (!ok) ++failures;
}

int run_ctl(const std::string& args) {
  std::string cmd = ctl + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return status < 0 ? -1 : WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

uint64_t set_slot(const Machine& m, const Valuation& v, const char* var) {
  return v.slots.at(*m.var_index(var)).as_set();
}

Valuation source_state(const Machine& m, uint64_t c1, bool done) {
  Valuation v = initialize(m);
  v.slots.at(*m.var_index("C1")) = Value::set(c1);
  v.slots.at(*m.var_index("selection_done")) = Value::boolean(done);
  return v;
}

std::string dump(const Machine& m, const Valuation& v) {
  return valuation_to_json(m, v).dump();
}

// Ascending-atom order with shorter-is-later padding: a set sorts before its
// proper subsets. Independent of the library's comparator.
bool set_before(uint64_t a, uint64_t b) {
  while (a != 0 && b != 0) {
    int ia = __builtin_ctzll(a), ib = __builtin_ctzll(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return a != 0;
}

// All six scenario checks pass through the CLI, within budget, and the two
// implementation machines have exactly the expected distinct cart contents.
void criterion_1() {
  Clock::time_point t0 = Clock::now();
  bool all_pass = true;
  for (const std::string& name : scenario_names())
    all_pass = all_pass && run_ctl("check --scenario " + name) == 0;
  double secs = seconds_since(t0);

  CommerceConfig five;
  auto [m11, sys1] = build_m11(five);
  std::vector<uint64_t> carts;
  for (const Valuation& v : reachable(m11).states) carts.push_back(set_slot(m11, v, "C1"));
  std::sort(carts.begin(), carts.end());
  carts.erase(std::unique(carts.begin(), carts.end()), carts.end());

  auto [m12, sys2] = build_m12(five);
  std::vector<std::pair<uint64_t, uint64_t>> pairs;
  for (const Valuation& v : reachable(m12).states)
    pairs.emplace_back(set_slot(m12, v, "C2a"), set_slot(m12, v, "C2b"));
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  char line[160];
  std::snprintf(line, sizeof line,
                "all six scenario checks pass in %.1fs (budget %.0fs), %zu distinct "
                "carts, %zu distinct cart pairs",
                secs, kAllChecksBudgetSeconds, carts.size(), pairs.size());
  report(1, all_pass && secs < kAllChecksBudgetSeconds &&
                carts.size() == kExpectedCarts && pairs.size() == kExpectedPairs,
         line);
}

// Both refinement links pass; a wrong gluing fails with a counterexample that
// replays through the kernel step function.
void criterion_2() {
  CommerceConfig five;
  bool ok = check_refinement(link_m1_m11(five)).pass &&
            check_refinement(link_m1_m12(five)).pass;

  RefinementLink bad = link_m1_m12(five);
  bad.gluing = ex::eq(ex::var("a.cart"), ex::var("c.C2a"));
  ObligationReport rep = check_refinement(bad);
  ok = ok && !rep.pass && rep.ce.has_value();
  if (rep.ce && rep.ce->event && rep.ce->binding && rep.ce->post) {
    Valuation cpre = pair_concrete_slice(bad, rep.ce->pre);
    Valuation cpost = step(bad.concrete, cpre, *rep.ce->event, *rep.ce->binding);
    ok = ok && dump(bad.concrete, cpost) ==
                   dump(bad.concrete, pair_concrete_slice(bad, *rep.ce->post));
  } else {
    ok = false;
  }
  report(2, ok,
         "both refinement links pass and the wrong gluing fails with a "
         "replayable counterexample");
}

// Hot switch, exhaustively over every pre-switch source state: nothing
// selected is lost, the horizontal invariant holds, the variant carries over,
// and the recovered carts are disjoint and invariant-satisfying.
void criterion_3() {
  CommerceConfig five;
  auto [m, cfg] = build_m142(five);
  const SystemDef& sys1 = m.systems.at(*m.system_index("Sys1"));
  const SystemDef& sys2 = m.systems.at(*m.system_index("Sys2"));
  uint64_t full = m.universe.full_mask();

  Clock::time_point t0 = Clock::now();
  bool ok = true;
  uint64_t states = 0;
  for (uint64_t c1 = 0; c1 <= full; ++c1) {
    for (bool done : {false, true}) {
      if (done && c1 != full) continue;
      Valuation pre = source_state(m, c1, done);
      CompoundState post = switch_system(m, cfg, {"Sys1", pre});
      uint64_t a = set_slot(m, post.valuation, "C2a");
      uint64_t b = set_slot(m, post.valuation, "C2b");
      ok = ok && post.active == "Sys2";
      ok = ok && (a | b) == c1;  // no loss
      ok = ok && (a & b) == 0;
      ok = ok && eval_pred(m, post.valuation, *cfg.hinv->pred);
      ok = ok && variant_value(m, sys2, post.valuation) == variant_value(m, sys1, pre);
      ok = ok && !violated_invariant(m, post.valuation).has_value();
      ++states;
    }
  }
  double secs = seconds_since(t0);

  char line[160];
  std::snprintf(line, sizeof line,
                "hot switch over all %llu pre-switch states: no loss, horizontal "
                "invariant, variant continuity, disjointness (%.2fs, budget %.0fs)",
                static_cast<unsigned long long>(states), secs, kHotSweepBudgetSeconds);
  report(3, ok && states == kExpectedCarts + 1 && secs < kHotSweepBudgetSeconds, line);
}

// Cold switch resets the target to its init slice from every pre-switch
// state, and a cold run recovering at any early failure point still completes
// the purchase.
void criterion_4() {
  CommerceConfig five;
  auto [m, cfg] = build_m141(five);
  Valuation init = initialize(m);
  uint64_t full = m.universe.full_mask();

  bool ok = true;
  for (uint64_t c1 = 0; c1 <= full; ++c1) {
    Valuation pre = source_state(m, c1, false);
    CompoundState post = switch_system(m, cfg, {"Sys1", pre});
    ok = ok && set_slot(m, post.valuation, "C2a") == set_slot(m, init, "C2a");
    ok = ok && set_slot(m, post.valuation, "C2b") == set_slot(m, init, "C2b");
    ok = ok && set_slot(m, post.valuation, "C1") == c1;  // source frozen, not cleared
  }

  for (uint64_t k = 0; k <= 5; ++k) {
    Scenario s = make_scenario("m141", five);
    s.cfg->trigger = Trigger::at(k);
    ScenarioOptions opts;
    opts.seed = 2026 + k;
    Trace t = run_scenario(s.machine, s.cfg, s.initial_active, opts);
    const Valuation& last = t.records.back().valuation;
    ok = ok && t.quiescent && t.switch_step.has_value();
    ok = ok && last.slots.at(*s.machine.var_index("selection_done")).as_bool();
    ok = ok && (set_slot(s.machine, last, "C2a") | set_slot(s.machine, last, "C2b")) ==
                   full;
  }
  report(4, ok,
         "cold switch restores the target init slice from every pre-switch state, "
         "and restarted runs complete the purchase for every failure step 0..5");
}

// Each seeded defect flips exactly its obligation from pass to fail, and the
// counterexample replays through the kernel (or the switch it names).
void criterion_5() {
  CommerceConfig five;
  bool ok = true;

  auto [good12, gs12] = build_m12(five);
  auto [bad12, bs12] = build_m12(five, Mutant::DropDisjointnessGuard);
  ok = ok && check_invariants(good12).pass;
  ObligationReport inv = check_invariants(bad12);
  ok = ok && !inv.pass && inv.ce && inv.ce->event && inv.ce->post;
  if (inv.ce && inv.ce->event && inv.ce->post) {
    Valuation post = step(*inv.layout, inv.ce->pre, *inv.ce->event, *inv.ce->binding);
    ok = ok && dump(*inv.layout, post) == dump(*inv.layout, *inv.ce->post);
    ok = ok && violated_invariant(*inv.layout, post).has_value();
    ok = ok && !violated_invariant(*inv.layout, inv.ce->pre).has_value();
  }

  auto [good11, gsys] = build_m11(five);
  auto [bad11, bsys] = build_m11(five, Mutant::NonDecreasingSelect);
  ok = ok && check_variant(good11, gsys).pass;
  ObligationReport var = check_variant(bad11, bsys);
  ok = ok && !var.pass && var.ce && var.ce->event && var.ce->post;
  if (var.ce && var.ce->event && var.ce->post) {
    Valuation post = step(*var.layout, var.ce->pre, *var.ce->event, *var.ce->binding);
    ok = ok && dump(*var.layout, post) == dump(*var.layout, *var.ce->post);
    ok = ok && variant_value(*var.layout, bsys, post) >=
                   variant_value(*var.layout, bsys, var.ce->pre);
  }

  auto [goodm, goodc] = build_m142(five);
  auto [badm, badc] = build_m142(five, Mutant::HinvFalse);
  ok = ok && check_substitution(goodm, goodc).pass;
  ObligationReport sub = check_substitution(badm, badc);
  ok = ok && !sub.pass && sub.ce && sub.ce->event_name == "switch";
  if (sub.ce) {
    bool threw = false;
    try {
      switch_system(badm, badc, {badc.source, sub.ce->pre});
    } catch (const UnrecoverableError&) {
      threw = true;
    }
    ok = ok && threw;
  }
  report(5, ok,
         "all three mutants flip their checks, with counterexamples that replay");
}

// Recovery returns the least admissible target assignment, checked against an
// independent brute-force minimum on every source state at every size.
void criterion_6() {
  bool ok = true;
  uint64_t inputs = 0;
  for (uint32_t n = 1; n <= kMaxProducts; ++n) {
    CommerceConfig cfg;
    cfg.products = n;
    auto [m, sub] = build_m142(cfg);
    uint64_t full = m.universe.full_mask();
    for (uint64_t c1 = 0; c1 <= full; ++c1) {
      for (bool done : {false, true}) {
        if (done && c1 != full) continue;
        Valuation cur = source_state(m, c1, done);
        Valuation got = recover_state(m, sub, cur);

        // Brute force: every target pair, filtered by the switch conditions,
        // least by C2a then C2b in canonical set order.
        bool found = false;
        uint64_t best_a = 0, best_b = 0;
        for (uint64_t a = 0; a <= full; ++a) {
          for (uint64_t b = 0; b <= full; ++b) {
            if ((a | b) != c1) continue;       // horizontal invariant
            if ((a & b) != 0) continue;        // disjointness invariant
            if (__builtin_popcountll(a | b) != __builtin_popcountll(c1))
              continue;                        // variant match
            bool better = !found || set_before(a, best_a) ||
                          (a == best_a && set_before(b, best_b));
            if (better) {
              best_a = a;
              best_b = b;
            }
            found = true;
          }
        }
        ok = ok && found;
        ok = ok && set_slot(m, got, "C2a") == best_a;
        ok = ok && set_slot(m, got, "C2b") == best_b;
        ok = ok && set_slot(m, got, "C1") == c1;  // source untouched
        ++inputs;
      }
    }
  }
  char line[120];
  std::snprintf(line, sizeof line,
                "recovery equals the brute-force minimum on all %llu inputs up to %u "
                "products",
                static_cast<unsigned long long>(inputs), kMaxProducts);
  report(6, ok, line);
}

// Reruns with the same seed are byte-identical, and an exported machine
// imports back to the same canonical document.
void criterion_7() {
  bool ok = true;
  for (const std::string& spec :
       {std::string("simulate --scenario m142 --seed 7"),
        std::string("simulate --scenario m13 --seed 5"),
        std::string("simulate --scenario m141 --fail-at 2 --seed 9")}) {
    ok = ok && run_ctl(spec + " --out acc_trace_a.jsonl") == 0;
    ok = ok && run_ctl(spec + " --out acc_trace_b.jsonl") == 0;
    std::string a = slurp("acc_trace_a.jsonl");
    ok = ok && !a.empty() && a == slurp("acc_trace_b.jsonl");
  }
  std::remove("acc_trace_a.jsonl");
  std::remove("acc_trace_b.jsonl");

  CommerceConfig five;
  for (const std::string& name : scenario_names()) {
    ok = ok && run_ctl("export --scenario " + name + " --out acc_machine.json") == 0;
    Machine loaded = load_machine("acc_machine.json");
    Machine built = make_scenario(name, five).machine;
    ok = ok && machine_to_json(loaded).dump() == machine_to_json(built).dump();
  }
  std::remove("acc_machine.json");
  report(7, ok,
         "same-seed traces are byte-identical and export/import reproduces the "
         "canonical machine document");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <path-to-substctl>\n", argv[0]);
    return 2;
  }
  ctl = argv[1];

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();

  if (failures == 0) {
    std::printf("acceptance: all 7 criteria pass\n");
    return 0;
  }
  std::printf("acceptance: %d criteria failed\n", failures);
  return 1;
}
