#include "subst/scenario.hpp"

#include <random>

#include "subst/json_io.hpp"

namespace subst {

namespace {

std::vector<std::pair<std::string, uint64_t>> system_variants(const Machine& m,
                                                              const Valuation& v) {
  std::vector<std::pair<std::string, uint64_t>> out;
  out.reserve(m.systems.size());
  for (const SystemDef& s : m.systems) out.emplace_back(s.id, variant_value(m, s, v));
  return out;
}

}  // namespace

Trace run_scenario(const Machine& m, const std::optional<SubstitutionConfig>& cfg,
                   const std::string& initial_active, const ScenarioOptions& opts) {
  if (cfg) validate_config(m, *cfg);
  std::string active =
      opts.initial_active.empty() ? initial_active : opts.initial_active;
  if (!active.empty() && !m.system_index(active))
    throw ConfigError("machine '" + m.name + "' has no system '" + active + "'");

  Valuation v = initialize(m);
  std::mt19937_64 rng(opts.seed);
  bool switched = false;

  Trace trace;
  trace.records.push_back(
      {0, active, std::nullopt, std::nullopt, v, system_variants(m, v), std::nullopt});

  std::vector<uint32_t> events = active_events(m, active);
  std::vector<std::vector<Binding>> bindings;
  bindings.reserve(m.events.size());
  for (const GuardedEvent& e : m.events) bindings.push_back(event_bindings(m, e));

  while (true) {
    if (cfg && !switched && active == cfg->source &&
        trigger_fires(m, cfg->trigger, v, trace.kernel_steps)) {
      uint64_t pre_variant = variant_value(m, m.require_system(cfg->source), v);
      CompoundState post = switch_system(m, *cfg, CompoundState{active, v});
      active = post.active;
      v = post.valuation;
      events = active_events(m, active);
      switched = true;

      SwitchRecord rec;
      rec.policy = cfg->policy;
      rec.pre_variant = pre_variant;
      rec.post_variant = variant_value(m, m.require_system(cfg->target), v);
      rec.hinv_holds = !cfg->hinv || eval_pred(m, v, *cfg->hinv->pred);
      uint64_t index = trace.records.size();
      trace.switch_step = index;
      trace.records.push_back(
          {index, active, std::nullopt, std::nullopt, v, system_variants(m, v), rec});
      continue;
    }

    std::vector<EnabledEvent> en;
    for (uint32_t e : events)
      for (const Binding& b : bindings[e])
        if (guard_holds(m, v, m.events[e], b)) en.push_back({e, b});
    if (en.empty()) {
      trace.quiescent = true;
      break;
    }
    if (trace.kernel_steps >= opts.max_steps)
      throw MaxStepsExceededError("no quiescence within " +
                                  std::to_string(opts.max_steps) + " steps");

    const EnabledEvent& pick = opts.driver == DriverPolicy::FirstEnabled
                                   ? en[0]
                                   : en[rng() % en.size()];
    v = step(m, v, pick.event, pick.binding);
    ++trace.kernel_steps;
    trace.records.push_back({trace.records.size(), active, m.events[pick.event].name,
                             pick.binding, v, system_variants(m, v), std::nullopt});
  }
  return trace;
}

std::string trace_to_jsonl(const Machine& m, const Trace& t) {
  std::string out;
  for (const TraceRecord& r : t.records) {
    Json line;
    line["step"] = r.step;
    line["active"] = r.active;
    if (r.event) line["event"] = *r.event;
    if (r.binding) {
      Json b = Json::array();
      for (const Value& value : *r.binding) b.push_back(value_to_json(value, m.universe));
      line["binding"] = std::move(b);
    }
    line["valuation"] = valuation_to_json(m, r.valuation);
    Json variants = Json::object();
    for (const auto& [id, value] : r.variants) variants[id] = value;
    line["variants"] = std::move(variants);
    if (r.switched) {
      Json s;
      s["policy"] = policy_name(r.switched->policy);
      s["pre_variant"] = r.switched->pre_variant;
      s["post_variant"] = r.switched->post_variant;
      s["hinv_holds"] = r.switched->hinv_holds;
      line["switch"] = std::move(s);
    }
    out += line.dump();
    out += "\n";
  }
  return out;
}

}  // namespace subst
