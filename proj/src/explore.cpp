#include "subst/explore.hpp"

#include <algorithm>
#include <unordered_set>

namespace subst {

namespace {

struct Slot {
  NodeResult result;
  std::exception_ptr error;
};

}  // namespace

ExploreResult explore(const Valuation& init, const ExpandFn& expand,
                      const ExploreOptions& opts) {
  ExploreResult res;
  std::unordered_set<Valuation, ValuationHash> seen{init};
  std::vector<Valuation> layer{init};
  res.states.push_back(init);

  while (!layer.empty()) {
    std::vector<Slot> slots(layer.size());
    const bool parallel = opts.mode == ExecMode::Parallel;
    const int64_t count = static_cast<int64_t>(layer.size());
#ifndef _OPENMP
    (void)parallel;
#endif

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
    for (int64_t i = 0; i < count; ++i) {
      try {
        slots[i].result = expand(layer[i]);
      } catch (...) {
        slots[i].error = std::current_exception();
      }
    }

    // Errors and violations surface in node-rank order so the outcome does
    // not depend on worker scheduling.
    for (const Slot& s : slots)
      if (s.error) std::rethrow_exception(s.error);
    for (uint64_t r = 0; r < slots.size(); ++r)
      if (slots[r].result.violation) {
        res.violation =
            ExploreViolation{res.layers, r, layer[r], *slots[r].result.violation};
        break;
      }
    if (res.violation) break;

    std::vector<Valuation> next;
    for (Slot& s : slots)
      for (Valuation& v : s.result.successors)
        if (seen.insert(v).second) next.push_back(std::move(v));

    if (res.states.size() + next.size() > opts.state_cap)
      throw StateCapExceededError(opts.state_cap, next.size());
    res.states.insert(res.states.end(), next.begin(), next.end());
    layer = std::move(next);
    ++res.layers;
  }

  std::sort(res.states.begin(), res.states.end(), valuation_less);
  return res;
}

ExploreResult reachable(const Machine& m, const ExploreOptions& opts) {
  Valuation init = initialize(m);
  std::vector<std::vector<Binding>> bindings;
  bindings.reserve(m.events.size());
  for (const GuardedEvent& e : m.events) bindings.push_back(event_bindings(m, e));

  ExpandFn expand = [&m, &bindings](const Valuation& v) {
    NodeResult out;
    for (uint32_t e = 0; e < m.events.size(); ++e)
      for (const Binding& b : bindings[e])
        if (guard_holds(m, v, m.events[e], b))
          out.successors.push_back(step(m, v, e, b));
    return out;
  };
  return explore(init, expand, opts);
}

}  // namespace subst
