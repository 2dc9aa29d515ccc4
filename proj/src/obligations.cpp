#include "subst/obligations.hpp"

#include <algorithm>

namespace subst {

const char* obligation_kind_name(ObligationKind k) {
  switch (k) {
    case ObligationKind::Invariants:
      return "invariants";
    case ObligationKind::Variant:
      return "variant";
    case ObligationKind::Refinement:
      return "refinement";
    case ObligationKind::Substitution:
      return "substitution";
  }
  return "unknown";
}

ObligationReport check_invariants(const Machine& m, const ExploreOptions& opts) {
  ObligationReport report;
  report.kind = ObligationKind::Invariants;
  report.subject = m.name;
  report.layout = std::make_shared<Machine>(m);

  if (auto bad = violated_invariant(m, m.init)) {
    report.states = 1;
    report.ce = Counterexample{
        m.init, std::nullopt, "", std::nullopt, std::nullopt,
        expr_to_string(*m.invariants[*bad], m.universe)};
    return report;
  }

  std::vector<std::vector<Binding>> bindings;
  bindings.reserve(m.events.size());
  for (const GuardedEvent& e : m.events) bindings.push_back(event_bindings(m, e));

  ExpandFn expand = [&m, &bindings](const Valuation& v) {
    NodeResult out;
    for (uint32_t e = 0; e < m.events.size() && !out.violation; ++e)
      for (uint32_t b = 0; b < bindings[e].size(); ++b) {
        if (!guard_holds(m, v, m.events[e], bindings[e][b])) continue;
        Valuation post = step(m, v, e, bindings[e][b]);
        if (auto bad = violated_invariant(m, post)) {
          out.violation = NodeViolation{false, e, b, *bad, "", bindings[e][b], post};
          break;
        }
        out.successors.push_back(std::move(post));
      }
    return out;
  };

  ExploreResult res = explore(m.init, expand, opts);
  report.states = res.states.size();
  if (res.violation) {
    const NodeViolation& at = res.violation->at;
    report.ce = Counterexample{
        res.violation->pre, at.event, m.events[at.event].name, at.bind, at.post,
        expr_to_string(*m.invariants[at.detail], m.universe)};
  } else {
    report.pass = true;
  }
  return report;
}

namespace {

// Shared body of the system-level and machine-level variant checks:
// `convergent` lists the event indices that must strictly decrease `variant`.
ObligationReport check_variant_impl(const Machine& m, std::string subject,
                                    const std::vector<uint32_t>& convergent,
                                    const ExprPtr& variant,
                                    const ExploreOptions& opts) {
  ObligationReport report;
  report.kind = ObligationKind::Variant;
  report.subject = std::move(subject);
  report.layout = std::make_shared<Machine>(m);

  if (convergent.empty()) {
    report.pass = true;
    return report;
  }

  std::vector<std::vector<Binding>> bindings;
  bindings.reserve(m.events.size());
  for (const GuardedEvent& e : m.events) bindings.push_back(event_bindings(m, e));
  std::vector<bool> must_decrease(m.events.size(), false);
  for (uint32_t e : convergent) must_decrease[e] = true;

  ExpandFn expand = [&](const Valuation& v) {
    NodeResult out;
    uint64_t pre_variant = eval_nat(m, v, *variant);
    for (uint32_t e = 0; e < m.events.size() && !out.violation; ++e)
      for (uint32_t b = 0; b < bindings[e].size(); ++b) {
        if (!guard_holds(m, v, m.events[e], bindings[e][b])) continue;
        Valuation post = step(m, v, e, bindings[e][b]);
        if (must_decrease[e] && eval_nat(m, post, *variant) >= pre_variant) {
          out.violation = NodeViolation{false, e, b, 0, "", bindings[e][b], post};
          break;
        }
        out.successors.push_back(std::move(post));
      }
    return out;
  };

  ExploreResult res = explore(initialize(m), expand, opts);
  report.states = res.states.size();
  if (res.violation) {
    const NodeViolation& at = res.violation->at;
    report.ce = Counterexample{
        res.violation->pre, at.event, m.events[at.event].name, at.bind, at.post,
        "variant " + expr_to_string(*variant, m.universe) + " not strictly decreased"};
  } else {
    report.pass = true;
  }
  return report;
}

}  // namespace

ObligationReport check_variant(const Machine& m, const SystemDef& s,
                               const ExploreOptions& opts) {
  auto owner = attribute_events(m);
  auto sys = m.system_index(s.id);
  if (!sys) throw ValidationError("machine '" + m.name + "' has no system '" + s.id + "'");
  std::vector<uint32_t> convergent;
  for (uint32_t e = 0; e < m.events.size(); ++e)
    if (m.events[e].convergent && owner[e] == *sys) convergent.push_back(e);
  return check_variant_impl(m, m.name + ":" + s.id, convergent, s.variant, opts);
}

ObligationReport check_variant(const Machine& m, const ExploreOptions& opts) {
  auto owner = attribute_events(m);
  std::vector<uint32_t> convergent;
  for (uint32_t e = 0; e < m.events.size(); ++e)
    if (m.events[e].convergent && !owner[e]) convergent.push_back(e);
  if (!convergent.empty() && !m.variant)
    throw ValidationError("machine '" + m.name + "' has convergent events but no variant");
  return check_variant_impl(m, m.name, convergent,
                            m.variant ? m.variant : ex::nat(0), opts);
}

Machine pair_machine(const RefinementLink& link) {
  Machine pair;
  pair.name = link.abstract.name + "<-" + link.concrete.name;
  pair.universe = link.concrete.universe;
  for (const VarDecl& v : link.abstract.vars)
    pair.vars.push_back({"a." + v.name, v.kind, v.nat_bound});
  for (const VarDecl& v : link.concrete.vars)
    pair.vars.push_back({"c." + v.name, v.kind, v.nat_bound});
  pair.init.slots = link.abstract.init.slots;
  pair.init.slots.insert(pair.init.slots.end(), link.concrete.init.slots.begin(),
                         link.concrete.init.slots.end());
  return pair;
}

Valuation pair_abstract_slice(const RefinementLink& link, const Valuation& pair) {
  Valuation v;
  v.slots.assign(pair.slots.begin(), pair.slots.begin() + link.abstract.vars.size());
  return v;
}

Valuation pair_concrete_slice(const RefinementLink& link, const Valuation& pair) {
  Valuation v;
  v.slots.assign(pair.slots.begin() + link.abstract.vars.size(), pair.slots.end());
  return v;
}

namespace {

// Violation details of the refinement simulation.
enum : uint32_t {
  kAbstractNotEnabled = 0,
  kGluingAfterStep = 1,
  kGluingAfterStutter = 2,
};

Valuation join_pair(const Valuation& va, const Valuation& vc) {
  Valuation pair;
  pair.slots = va.slots;
  pair.slots.insert(pair.slots.end(), vc.slots.begin(), vc.slots.end());
  return pair;
}

}  // namespace

ObligationReport check_refinement(const RefinementLink& link,
                                  const ExploreOptions& opts) {
  const Machine& abs = link.abstract;
  const Machine& conc = link.concrete;
  if (abs.universe.atoms() != conc.universe.atoms())
    throw ValidationError("refinement '" + abs.name + "<-" + conc.name +
                          "' links machines over different universes");

  auto pair = std::make_shared<Machine>(pair_machine(link));

  // Gluing must be a predicate over the qualified variable union.
  try {
    SortEnv env = pair->var_sorts();
    require_sort(*link.gluing, Kind::Bool, env, "gluing");
  } catch (const Error& e) {
    throw GluingIllSortedError(e.what());
  }

  // Resolve the event map: every concrete event exactly once; mapped abstract
  // events exist and their parameters are a subset of the concrete event's.
  std::vector<std::optional<uint32_t>> mapped(conc.events.size());
  std::vector<bool> seen_map(conc.events.size(), false);
  for (const auto& [cname, aname] : link.event_map) {
    auto ci = conc.event_index(cname);
    if (!ci) throw ValidationError("event map names unknown concrete event '" + cname + "'");
    if (seen_map[*ci]) throw ValidationError("event map lists '" + cname + "' twice");
    seen_map[*ci] = true;
    if (!aname) continue;  // stutter
    auto ai = abs.event_index(*aname);
    if (!ai) throw ValidationError("event map names unknown abstract event '" + *aname + "'");
    mapped[*ci] = *ai;
    for (const ParamDecl& ap : abs.events[*ai].params) {
      const auto& cparams = conc.events[*ci].params;
      auto it = std::find_if(cparams.begin(), cparams.end(),
                             [&](const ParamDecl& cp) { return cp.name == ap.name; });
      if (it == cparams.end() || !(it->domain == ap.domain))
        throw ValidationError("abstract event '" + *aname + "' parameter '" + ap.name +
                              "' has no matching parameter on '" + cname + "'");
    }
  }
  for (uint32_t c = 0; c < conc.events.size(); ++c)
    if (!seen_map[c])
      throw ValidationError("concrete event '" + conc.events[c].name + "' is unmapped");

  // Abstract binding for a concrete binding, matched by parameter name.
  auto map_binding = [&](uint32_t ci, uint32_t ai, const Binding& cb) {
    Binding ab;
    for (const ParamDecl& ap : abs.events[ai].params) {
      const auto& cparams = conc.events[ci].params;
      for (size_t k = 0; k < cparams.size(); ++k)
        if (cparams[k].name == ap.name) {
          ab.push_back(cb[k]);
          break;
        }
    }
    return ab;
  };

  ObligationReport report;
  report.kind = ObligationKind::Refinement;
  report.subject = abs.name + "<-" + conc.name;
  report.layout = pair;

  auto glued = [&pair, &link](const Valuation& v) {
    return eval_pred(*pair, v, *link.gluing);
  };
  std::string gluing_text = expr_to_string(*link.gluing, pair->universe);

  if (!glued(pair->init)) {
    report.states = 1;
    report.ce = Counterexample{pair->init, std::nullopt, "", std::nullopt,
                               std::nullopt, "gluing at initialization: " + gluing_text};
    return report;
  }

  std::vector<std::vector<Binding>> bindings;
  bindings.reserve(conc.events.size());
  for (const GuardedEvent& e : conc.events) bindings.push_back(event_bindings(conc, e));

  const size_t abs_count = abs.vars.size();
  ExpandFn expand = [&](const Valuation& pv) {
    Valuation va, vc;
    va.slots.assign(pv.slots.begin(), pv.slots.begin() + abs_count);
    vc.slots.assign(pv.slots.begin() + abs_count, pv.slots.end());

    NodeResult out;
    for (uint32_t e = 0; e < conc.events.size() && !out.violation; ++e)
      for (uint32_t b = 0; b < bindings[e].size(); ++b) {
        if (!guard_holds(conc, vc, conc.events[e], bindings[e][b])) continue;
        Valuation vc2 = step(conc, vc, e, bindings[e][b]);
        if (!mapped[e]) {
          Valuation pair2 = join_pair(va, vc2);
          if (!glued(pair2)) {
            out.violation =
                NodeViolation{false, e, b, kGluingAfterStutter, "", bindings[e][b], pair2};
            break;
          }
          out.successors.push_back(std::move(pair2));
          continue;
        }
        uint32_t ai = *mapped[e];
        Binding ab = map_binding(e, ai, bindings[e][b]);
        if (!guard_holds(abs, va, abs.events[ai], ab)) {
          out.violation = NodeViolation{false, e, b, kAbstractNotEnabled, "",
                                        bindings[e][b], join_pair(va, vc2)};
          break;
        }
        Valuation va2 = step(abs, va, ai, ab);
        Valuation pair2 = join_pair(va2, vc2);
        if (!glued(pair2)) {
          out.violation =
              NodeViolation{false, e, b, kGluingAfterStep, "", bindings[e][b], pair2};
          break;
        }
        out.successors.push_back(std::move(pair2));
      }
    return out;
  };

  ExploreResult res = explore(pair->init, expand, opts);
  report.states = res.states.size();
  if (res.violation) {
    const NodeViolation& at = res.violation->at;
    std::string why;
    switch (at.detail) {
      case kAbstractNotEnabled:
        why = "abstract event '" + abs.events[*mapped[at.event]].name + "' not enabled";
        break;
      case kGluingAfterStep:
        why = "gluing violated after matched step: " + gluing_text;
        break;
      default:
        why = "gluing violated after stuttering step: " + gluing_text;
        break;
    }
    report.ce = Counterexample{res.violation->pre, at.event, conc.events[at.event].name,
                               at.bind, at.post, why};
  } else {
    report.pass = true;
  }
  return report;
}

Json report_to_json(const ObligationReport& r) {
  Json out;
  out["kind"] = obligation_kind_name(r.kind);
  out["machine"] = r.subject;
  out["verdict"] = r.pass ? "pass" : "fail";
  out["states"] = r.states;
  if (r.ce) {
    const Machine& layout = *r.layout;
    Json ce;
    ce["pre"] = valuation_to_json(layout, r.ce->pre);
    if (!r.ce->event_name.empty()) ce["event"] = r.ce->event_name;
    if (r.ce->binding) {
      Json b = Json::array();
      for (const Value& v : *r.ce->binding) b.push_back(value_to_json(v, layout.universe));
      ce["binding"] = std::move(b);
    }
    if (r.ce->post) ce["post"] = valuation_to_json(layout, *r.ce->post);
    ce["violated"] = r.ce->violated;
    out["counterexample"] = std::move(ce);
  }
  return out;
}

}  // namespace subst
