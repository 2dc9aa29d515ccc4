#pragma once

#include <functional>

#include "subst/exec.hpp"

namespace subst {

enum class ExecMode : uint8_t { Serial, Parallel };

struct ExploreOptions {
  uint64_t state_cap = 1'000'000;
  ExecMode mode = ExecMode::Parallel;
};

// A violation found while expanding one node. Checks on the node itself
// (state_level) precede checks on its outgoing edges; edges are ordered by
// (event, binding).
struct NodeViolation {
  bool state_level = false;
  uint32_t event = 0;
  uint32_t binding = 0;
  uint32_t detail = 0;   // checker-specific index
  std::string note;      // checker-specific context for the report
  std::optional<Binding> bind;
  std::optional<Valuation> post;
};

// One node's expansion: successor states in canonical local order plus the
// node's first violation in that order. Expansion functions must be pure;
// they are called from worker threads.
struct NodeResult {
  std::vector<Valuation> successors;
  std::optional<NodeViolation> violation;
};

using ExpandFn = std::function<NodeResult(const Valuation&)>;

struct ExploreViolation {
  uint64_t layer = 0;
  uint64_t node_rank = 0;  // rank of the node within its layer
  Valuation pre;
  NodeViolation at;
};

struct ExploreResult {
  std::vector<Valuation> states;  // every state reached, canonically sorted
  uint64_t layers = 0;
  std::optional<ExploreViolation> violation;
};

// Layered breadth-first exploration from `init`. Serial and Parallel produce
// identical results: nodes expand independently, merges run in node-rank
// order, and the reported violation is the minimum under
// (layer, node rank, state-before-edges, event, binding). Exploration stops
// at the end of the first layer containing a violation. Throws
// StateCapExceededError when the visited set would exceed the cap.
ExploreResult explore(const Valuation& init, const ExpandFn& expand,
                      const ExploreOptions& opts);

// States reachable from m's init under every enabled event.
ExploreResult reachable(const Machine& m, const ExploreOptions& opts = {});

}  // namespace subst
