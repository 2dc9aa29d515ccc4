#pragma once

#include "subst/obligations.hpp"

namespace subst {

enum class Policy : uint8_t { Cold, Warm, Hot };

const char* policy_name(Policy p);
std::optional<Policy> policy_from_name(std::string_view name);

// Predicate over source.sv ∪ target.sv, holding at the switch point.
struct HorizontalInvariant {
  ExprPtr pred;
};

// Failure monitor condition. AtStep fires once the given number of kernel
// transitions has completed; WhenPred fires when its predicate (over source
// variables) holds; Manual never fires on its own.
struct Trigger {
  enum class Tag : uint8_t { AtStep, WhenPred, Manual };

  Tag tag = Tag::Manual;
  uint64_t at_step = 0;
  ExprPtr when;

  static Trigger at(uint64_t step) { return {Tag::AtStep, step, nullptr}; }
  static Trigger when_pred(ExprPtr pred) { return {Tag::WhenPred, 0, std::move(pred)}; }
  static Trigger manual() { return {}; }
};

struct SubstitutionConfig {
  std::string source;
  std::string target;
  std::optional<HorizontalInvariant> hinv;  // required for Warm and Hot
  Policy policy = Policy::Cold;
  Trigger trigger;
};

// Structural requirements: distinct declared systems; hinv present for
// Warm/Hot, boolean, and over source/target variables only; a WhenPred
// trigger reads source variables only. Throws ValidationError.
void validate_config(const Machine& m, const SubstitutionConfig& cfg);

bool trigger_fires(const Machine& m, const Trigger& t, const Valuation& v,
                   uint64_t steps_completed);

// Which system currently runs, plus the full valuation. Inactive systems'
// variables are frozen: no event of an inactive system may fire.
struct CompoundState {
  std::string active;
  Valuation valuation;
};

bool variant_match(const Machine& m, const SystemDef& source, const Valuation& vs,
                   const SystemDef& target, const Valuation& vt);

// Least recovered state for Warm/Hot: enumerates every assignment of the
// target variables and keeps those where the horizontal invariant holds over
// the joined state, the target variant matches the source variant at
// `current`, and the joined state satisfies the machine invariants (Warm:
// also the machine checkpoint). Returns `current` with the target variables
// replaced by the least such assignment under the canonical valuation order.
// Throws UnrecoverableError with per-constraint candidate counts.
Valuation recover_state(const Machine& m, const SubstitutionConfig& cfg,
                        const Valuation& current);

// The switch: target variables are reset to their init values (Cold) or
// recovered (Warm/Hot), the target becomes active, and the source is frozen.
// Throws WrongActiveSystemError unless state.active is cfg.source.
CompoundState switch_system(const Machine& m, const SubstitutionConfig& cfg,
                            const CompoundState& state);

// Switch obligations, exhaustively over every state reachable while the
// source system is active: recovery succeeds, the horizontal invariant holds
// across the switch, variant continuity (Warm/Hot), the target equals its
// init slice (Cold), and the machine invariants hold after the switch.
ObligationReport check_substitution(const Machine& m, const SubstitutionConfig& cfg,
                                    const ExploreOptions& opts = {});

// Events the given active system may fire: its own plus those owned by no
// system. An empty id enables only unowned events (machines without systems
// run everything).
std::vector<uint32_t> active_events(const Machine& m, std::string_view active);

}  // namespace subst
