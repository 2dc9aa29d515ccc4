#pragma once

#include "subst/substitution.hpp"

namespace subst {

enum class DriverPolicy : uint8_t { SeededRandom, FirstEnabled };

struct ScenarioOptions {
  DriverPolicy driver = DriverPolicy::SeededRandom;
  uint64_t seed = 0;
  uint64_t max_steps = 10'000;
  // Overrides the scenario's initial active system when nonempty.
  std::string initial_active;
};

struct SwitchRecord {
  Policy policy = Policy::Cold;
  uint64_t pre_variant = 0;   // source variant before the switch
  uint64_t post_variant = 0;  // target variant after the switch
  bool hinv_holds = false;    // horizontal invariant across the switch
};

// One trace line: the state after the recorded transition (or the initial
// state), with every system's variant value.
struct TraceRecord {
  uint64_t step = 0;
  std::string active;
  std::optional<std::string> event;
  std::optional<Binding> binding;
  Valuation valuation;
  std::vector<std::pair<std::string, uint64_t>> variants;
  std::optional<SwitchRecord> switched;
};

struct Trace {
  std::vector<TraceRecord> records;
  uint64_t kernel_steps = 0;
  std::optional<uint64_t> switch_step;  // record index of the switch, if any
  bool quiescent = false;               // ended with no enabled event
};

// Drives the machine from init with the seeded driver choosing among the
// active system's enabled events. The switch executes at the first point the
// trigger fires; the run then continues on the target system until no event
// is enabled. Identical inputs produce identical traces. Throws
// MaxStepsExceededError when the step budget runs out before quiescence, and
// propagates switch errors.
Trace run_scenario(const Machine& m, const std::optional<SubstitutionConfig>& cfg,
                   const std::string& initial_active, const ScenarioOptions& opts);

// Line-delimited JSON, one record per line, deterministic byte-for-byte.
std::string trace_to_jsonl(const Machine& m, const Trace& t);

}  // namespace subst
