#include "subst/substitution.hpp"

#include <algorithm>

namespace subst {

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::Cold:
      return "cold";
    case Policy::Warm:
      return "warm";
    case Policy::Hot:
      return "hot";
  }
  return "unknown";
}

std::optional<Policy> policy_from_name(std::string_view name) {
  if (name == "cold") return Policy::Cold;
  if (name == "warm") return Policy::Warm;
  if (name == "hot") return Policy::Hot;
  return std::nullopt;
}

namespace {

// Names of the variables the two linked systems own.
std::set<std::string> linked_names(const Machine& m, const SystemDef& a,
                                   const SystemDef& b) {
  std::set<std::string> names;
  for (uint32_t v : a.vars) names.insert(m.vars[v].name);
  for (uint32_t v : b.vars) names.insert(m.vars[v].name);
  return names;
}

}  // namespace

void validate_config(const Machine& m, const SubstitutionConfig& cfg) {
  const SystemDef& source = m.require_system(cfg.source);
  const SystemDef& target = m.require_system(cfg.target);
  if (cfg.source == cfg.target)
    throw ValidationError("substitution source and target are both '" + cfg.source + "'");

  if (cfg.policy != Policy::Cold && !cfg.hinv)
    throw ValidationError(std::string(policy_name(cfg.policy)) +
                          " substitution requires a horizontal invariant");
  if (cfg.hinv) {
    SortEnv env = m.var_sorts();
    require_sort(*cfg.hinv->pred, Kind::Bool, env, "horizontal invariant");
    auto allowed = linked_names(m, source, target);
    for (const std::string& name : free_vars(*cfg.hinv->pred))
      if (!allowed.count(name))
        throw ValidationError("horizontal invariant reads '" + name +
                              "', which belongs to neither linked system");
  }
  if (cfg.trigger.tag == Trigger::Tag::WhenPred) {
    SortEnv env = m.var_sorts();
    require_sort(*cfg.trigger.when, Kind::Bool, env, "trigger predicate");
    std::set<std::string> source_names;
    for (uint32_t v : source.vars) source_names.insert(m.vars[v].name);
    for (const std::string& name : free_vars(*cfg.trigger.when))
      if (!source_names.count(name))
        throw ValidationError("trigger predicate reads '" + name +
                              "', which is not a source-system variable");
  }
}

bool trigger_fires(const Machine& m, const Trigger& t, const Valuation& v,
                   uint64_t steps_completed) {
  switch (t.tag) {
    case Trigger::Tag::AtStep:
      return steps_completed >= t.at_step;
    case Trigger::Tag::WhenPred:
      return eval_pred(m, v, *t.when);
    case Trigger::Tag::Manual:
      return false;
  }
  return false;
}

bool variant_match(const Machine& m, const SystemDef& source, const Valuation& vs,
                   const SystemDef& target, const Valuation& vt) {
  return variant_value(m, source, vs) == variant_value(m, target, vt);
}

namespace {

// Every value of one variable's declared domain, in canonical order.
std::vector<Value> var_domain(const Machine& m, const VarDecl& decl) {
  std::vector<Value> out;
  switch (decl.kind) {
    case Kind::Nat:
      for (uint64_t n = 0; n <= decl.nat_bound; ++n) out.push_back(Value::nat(n));
      break;
    case Kind::Bool:
      out.push_back(Value::boolean(false));
      out.push_back(Value::boolean(true));
      break;
    case Kind::Set:
      for (uint64_t mask = 0; mask <= m.universe.full_mask(); ++mask)
        out.push_back(Value::set(mask));
      break;
    case Kind::Atom:
      throw ValidationError("variable '" + decl.name + "' has atom kind");
  }
  return out;
}

}  // namespace

Valuation recover_state(const Machine& m, const SubstitutionConfig& cfg,
                        const Valuation& current) {
  if (cfg.policy == Policy::Cold)
    throw ConfigError("recover_state applies to warm and hot policies only");
  validate_config(m, cfg);
  const SystemDef& source = m.require_system(cfg.source);
  const SystemDef& target = m.require_system(cfg.target);
  const uint64_t source_variant = variant_value(m, source, current);
  const bool use_checkpoint = cfg.policy == Policy::Warm && m.checkpoint != nullptr;

  // Bound the enumeration before materializing any domain.
  constexpr uint64_t kMaxCandidates = uint64_t{1} << 24;
  uint64_t candidates = 1;
  for (uint32_t tv : target.vars) {
    const VarDecl& decl = m.vars[tv];
    uint64_t size = decl.kind == Kind::Nat
                        ? (decl.nat_bound >= kMaxCandidates ? kMaxCandidates + 1
                                                            : decl.nat_bound + 1)
                    : decl.kind == Kind::Bool ? 2
                    : m.universe.size() >= 24 ? kMaxCandidates + 1
                                              : uint64_t{1} << m.universe.size();
    if (size > kMaxCandidates || candidates > kMaxCandidates / size)
      throw ConfigError("recovery enumeration over " + std::to_string(target.vars.size()) +
                        " target variables is too large");
    candidates *= size;
  }

  std::vector<std::vector<Value>> domains;
  for (uint32_t tv : target.vars) domains.push_back(var_domain(m, m.vars[tv]));

  Valuation joined = current;
  std::optional<Valuation> best;
  uint64_t pass_hinv = 0, pass_variant = 0, pass_invariants = 0, pass_checkpoint = 0;

  std::vector<size_t> odometer(target.vars.size(), 0);
  for (uint64_t c = 0; c < candidates; ++c) {
    for (size_t i = 0; i < target.vars.size(); ++i)
      joined.slots[target.vars[i]] = domains[i][odometer[i]];
    for (size_t i = target.vars.size(); i-- > 0;) {
      if (++odometer[i] < domains[i].size()) break;
      odometer[i] = 0;
    }

    bool ok = true;
    if (eval_pred(m, joined, *cfg.hinv->pred))
      ++pass_hinv;
    else
      ok = false;
    if (variant_value(m, target, joined) == source_variant)
      ++pass_variant;
    else
      ok = false;
    if (!violated_invariant(m, joined))
      ++pass_invariants;
    else
      ok = false;
    if (use_checkpoint) {
      if (eval_pred(m, joined, *m.checkpoint))
        ++pass_checkpoint;
      else
        ok = false;
    }
    if (ok && (!best || valuation_less(joined, *best))) best = joined;
  }

  if (!best) {
    std::string msg = "no recoverable " + cfg.target + " state (" +
                      policy_name(cfg.policy) + "): of " + std::to_string(candidates) +
                      " candidates, " + std::to_string(pass_hinv) +
                      " satisfy the horizontal invariant, " + std::to_string(pass_variant) +
                      " match the source variant " + std::to_string(source_variant) +
                      ", " + std::to_string(pass_invariants) +
                      " satisfy the machine invariants";
    if (use_checkpoint)
      msg += ", " + std::to_string(pass_checkpoint) + " are checkpoint states";
    throw UnrecoverableError(msg);
  }
  return *best;
}

CompoundState switch_system(const Machine& m, const SubstitutionConfig& cfg,
                            const CompoundState& state) {
  if (state.active != cfg.source)
    throw WrongActiveSystemError("switch expects active system '" + cfg.source +
                                 "', but '" + state.active + "' is active");
  const SystemDef& target = m.require_system(cfg.target);

  CompoundState out;
  out.active = cfg.target;
  if (cfg.policy == Policy::Cold) {
    out.valuation = state.valuation;
    for (uint32_t tv : target.vars) out.valuation.slots[tv] = m.init.slots[tv];
  } else {
    out.valuation = recover_state(m, cfg, state.valuation);
  }
  return out;
}

namespace {

// Violation details of the switch obligations.
enum : uint32_t {
  kUnrecoverable = 0,
  kHinvAtSwitch = 1,
  kVariantContinuity = 2,
  kColdReset = 3,
  kPostInvariant = 4,
};

}  // namespace

ObligationReport check_substitution(const Machine& m, const SubstitutionConfig& cfg,
                                    const ExploreOptions& opts) {
  validate_config(m, cfg);
  const SystemDef& source = m.require_system(cfg.source);
  const SystemDef& target = m.require_system(cfg.target);

  ObligationReport report;
  report.kind = ObligationKind::Substitution;
  report.subject = m.name + ":" + cfg.source + "->" + cfg.target;
  report.layout = std::make_shared<Machine>(m);

  std::vector<uint32_t> events = active_events(m, cfg.source);
  std::vector<std::vector<Binding>> bindings;
  bindings.reserve(m.events.size());
  for (const GuardedEvent& e : m.events) bindings.push_back(event_bindings(m, e));

  // The switch must work from any source-active state, whether or not the
  // trigger would fire there, so the node check ignores the trigger.
  auto switch_violation = [&](const Valuation& v) -> std::optional<NodeViolation> {
    NodeViolation out;
    out.state_level = true;
    CompoundState post;
    try {
      post = switch_system(m, cfg, CompoundState{cfg.source, v});
    } catch (const UnrecoverableError& e) {
      out.detail = kUnrecoverable;
      out.note = e.what();
      return out;
    }
    out.post = post.valuation;
    if (cfg.policy == Policy::Cold) {
      for (uint32_t tv : target.vars)
        if (!(post.valuation.slots[tv] == m.init.slots[tv])) {
          out.detail = kColdReset;
          out.note = "variable '" + m.vars[tv].name + "' not reset to its init value";
          return out;
        }
    } else {
      if (!eval_pred(m, post.valuation, *cfg.hinv->pred)) {
        out.detail = kHinvAtSwitch;
        out.note = expr_to_string(*cfg.hinv->pred, m.universe);
        return out;
      }
      uint64_t pre_variant = variant_value(m, source, v);
      uint64_t post_variant = variant_value(m, target, post.valuation);
      if (pre_variant != post_variant) {
        out.detail = kVariantContinuity;
        out.note = "source variant " + std::to_string(pre_variant) +
                   ", target variant " + std::to_string(post_variant);
        return out;
      }
    }
    if (auto bad = violated_invariant(m, post.valuation)) {
      out.detail = kPostInvariant;
      out.note = expr_to_string(*m.invariants[*bad], m.universe);
      return out;
    }
    return std::nullopt;
  };

  ExpandFn expand = [&](const Valuation& v) {
    NodeResult out;
    if (auto bad = switch_violation(v)) {
      out.violation = std::move(bad);
      return out;
    }
    for (uint32_t e : events)
      for (const Binding& b : bindings[e])
        if (guard_holds(m, v, m.events[e], b))
          out.successors.push_back(step(m, v, e, b));
    return out;
  };

  ExploreResult res = explore(initialize(m), expand, opts);
  report.states = res.states.size();
  if (res.violation) {
    const NodeViolation& at = res.violation->at;
    std::string why;
    switch (at.detail) {
      case kUnrecoverable:
        why = at.note;
        break;
      case kHinvAtSwitch:
        why = "horizontal invariant violated at switch: " + at.note;
        break;
      case kVariantContinuity:
        why = "variant continuity violated at switch: " + at.note;
        break;
      case kColdReset:
        why = "cold switch did not reset the target: " + at.note;
        break;
      default:
        why = "machine invariant violated after switch: " + at.note;
        break;
    }
    report.ce = Counterexample{res.violation->pre, std::nullopt, "switch",
                               std::nullopt, at.post, why};
  } else {
    report.pass = true;
  }
  return report;
}

std::vector<uint32_t> active_events(const Machine& m, std::string_view active) {
  auto owner = attribute_events(m);
  auto sys = m.system_index(active);
  std::vector<uint32_t> out;
  for (uint32_t e = 0; e < m.events.size(); ++e)
    if (!owner[e] || (sys && owner[e] == *sys)) out.push_back(e);
  return out;
}

}  // namespace subst
