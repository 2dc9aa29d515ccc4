#pragma once

#include <memory>

#include "subst/explore.hpp"
#include "subst/json_io.hpp"

namespace subst {

enum class ObligationKind : uint8_t { Invariants, Variant, Refinement, Substitution };

const char* obligation_kind_name(ObligationKind k);

// A failed check, replayable: stepping the layout machine from `pre` with
// (event, binding) reproduces `post` and the violation.
struct Counterexample {
  Valuation pre;
  std::optional<uint32_t> event;  // index into the layout machine's events
  std::string event_name;
  std::optional<Binding> binding;
  std::optional<Valuation> post;
  std::string violated;  // the failed predicate or property
};

struct ObligationReport {
  ObligationKind kind = ObligationKind::Invariants;
  std::string subject;  // machine name, optionally qualified (m11:Sys1, m1<-m11)
  bool pass = false;
  uint64_t states = 0;  // distinct states explored when the check stopped
  std::optional<Counterexample> ce;
  // Machine whose variable layout interprets the valuations above. For
  // refinement checks this is the synthesized pair machine.
  std::shared_ptr<const Machine> layout;
};

// Every reachable state satisfies every invariant, and every step from a
// reachable state lands in an invariant-satisfying state.
ObligationReport check_invariants(const Machine& m, const ExploreOptions& opts = {});

// Every enabled convergent event owned by `s` strictly decreases s's variant,
// on every reachable state. Vacuous pass without such events.
ObligationReport check_variant(const Machine& m, const SystemDef& s,
                               const ExploreOptions& opts = {});

// Machine-level variant: covers convergent events owned by no system.
ObligationReport check_variant(const Machine& m, const ExploreOptions& opts = {});

// A concrete machine simulates an abstract one under a gluing predicate. The
// gluing is written over qualified names: "a.<var>" for abstract variables,
// "c.<var>" for concrete ones.
struct RefinementLink {
  Machine abstract;
  Machine concrete;
  ExprPtr gluing;
  // Concrete event name -> abstract event name, or nullopt for stutter.
  std::vector<std::pair<std::string, std::optional<std::string>>> event_map;
};

// Variable layout of the simulation state space: abstract variables as
// "a.<name>" followed by concrete variables as "c.<name>".
Machine pair_machine(const RefinementLink& link);

Valuation pair_abstract_slice(const RefinementLink& link, const Valuation& pair);
Valuation pair_concrete_slice(const RefinementLink& link, const Valuation& pair);

// Simulation over reachable glued pairs: the init pair is glued, and every
// concrete step is matched by its mapped abstract event (or stutters) with
// the gluing re-established. Counterexample valuations use the pair layout;
// (event, binding) refer to the concrete machine.
ObligationReport check_refinement(const RefinementLink& link,
                                  const ExploreOptions& opts = {});

Json report_to_json(const ObligationReport& r);

}  // namespace subst
