#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "subst/commerce.hpp"
#include "subst/json_io.hpp"

namespace {

using namespace subst;

struct Options {
  std::string scenario;
  std::string machine_file;
  uint32_t products = 5;
  std::optional<std::string> purchase;
  std::string policy;
  std::optional<uint64_t> fail_at;
  std::string fail_when_file;
  uint64_t seed = 0;
  uint64_t max_steps = 10'000;
  std::optional<uint64_t> state_cap;
  std::string out;
  std::string mutate;
};

uint64_t resolve_state_cap(const Options& o) {
  if (o.state_cap) return *o.state_cap;
  if (const char* env = std::getenv("SUBST_STATE_CAP")) {
    char* end = nullptr;
    uint64_t cap = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || cap == 0)
      throw ConfigError("SUBST_STATE_CAP must be a positive integer");
    return cap;
  }
  return 1'000'000;
}

CommerceConfig commerce_config(const Options& o) {
  CommerceConfig cfg;
  cfg.products = o.products;
  if (o.purchase) {
    Universe u = product_universe(o.products);
    uint64_t mask = 0;
    std::stringstream ss(*o.purchase);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (token.empty()) continue;
      auto idx = u.index_of(token);
      if (!idx) throw ConfigError("unknown product '" + token + "' in --purchase");
      mask |= uint64_t{1} << *idx;
    }
    cfg.purchase = mask;
  }
  return cfg;
}

Mutant mutant_option(const Options& o) {
  if (o.mutate.empty()) return Mutant::None;
  auto m = mutant_from_name(o.mutate);
  if (!m) throw ConfigError("unknown mutant '" + o.mutate + "'");
  return *m;
}

void require_one_source(const Options& o) {
  if (o.scenario.empty() == o.machine_file.empty())
    throw ConfigError("give exactly one of --scenario and --machine");
}

// Applies the --policy / --fail-at / --fail-when overrides.
void apply_substitution_flags(const Options& o, Scenario& s) {
  if (!o.policy.empty()) {
    if (!s.cfg)
      throw ConfigError("scenario '" + s.name + "' has no substitution to set a policy on");
    auto p = policy_from_name(o.policy);
    if (!p) throw ConfigError("unknown policy '" + o.policy + "'");
    s.cfg->policy = *p;
  }
  if (o.fail_at && !o.fail_when_file.empty())
    throw ConfigError("give at most one of --fail-at and --fail-when");
  if (o.fail_at || !o.fail_when_file.empty()) {
    if (!s.cfg)
      throw ConfigError("scenario '" + s.name + "' has no substitution to trigger");
    if (o.fail_at) {
      s.cfg->trigger = Trigger::at(*o.fail_at);
    } else {
      std::ifstream in(o.fail_when_file);
      if (!in) throw ConfigError("cannot open '" + o.fail_when_file + "'");
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + o.fail_when_file + "' is not valid JSON: " + e.what());
      }
      s.cfg->trigger = Trigger::when_pred(expr_from_json(j, s.machine.universe));
    }
  }
  if (s.cfg) validate_config(s.machine, *s.cfg);
}

std::ostream& open_out(const Options& o, std::ofstream& file) {
  if (o.out.empty()) return std::cout;
  file.open(o.out, std::ios::binary);
  if (!file) throw ConfigError("cannot open '" + o.out + "' for writing");
  return file;
}

int cmd_check(const Options& o) {
  require_one_source(o);
  ExploreOptions opts;
  opts.state_cap = resolve_state_cap(o);

  std::vector<ObligationReport> reports;
  if (!o.machine_file.empty()) {
    if (!o.mutate.empty())
      throw ConfigError("--mutate applies to registry scenarios only");
    Machine m = load_machine(o.machine_file);
    reports.push_back(check_invariants(m, opts));
    if (m.variant) reports.push_back(check_variant(m, opts));
    for (const SystemDef& s : m.systems) reports.push_back(check_variant(m, s, opts));
  } else {
    Scenario s = make_scenario(o.scenario, commerce_config(o), mutant_option(o));
    reports.push_back(check_invariants(s.machine, opts));
    if (s.machine.variant) reports.push_back(check_variant(s.machine, opts));
    for (const SystemDef& sys : s.machine.systems)
      reports.push_back(check_variant(s.machine, sys, opts));
    for (const RefinementLink& link : s.refinements)
      reports.push_back(check_refinement(link, opts));
    if (s.cfg) reports.push_back(check_substitution(s.machine, *s.cfg, opts));
  }

  std::ofstream file;
  std::ostream& dest = open_out(o, file);
  bool all_pass = true;
  for (const ObligationReport& r : reports) {
    dest << report_to_json(r).dump() << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

int cmd_simulate(const Options& o) {
  require_one_source(o);
  Scenario s;
  if (!o.machine_file.empty()) {
    if (!o.mutate.empty())
      throw ConfigError("--mutate applies to registry scenarios only");
    s.name = o.machine_file;
    s.machine = load_machine(o.machine_file);
    if (!s.machine.systems.empty()) s.initial_active = s.machine.systems[0].id;
  } else {
    s = make_scenario(o.scenario, commerce_config(o), mutant_option(o));
  }
  apply_substitution_flags(o, s);

  ScenarioOptions run;
  run.seed = o.seed;
  run.max_steps = o.max_steps;

  Trace trace;
  try {
    trace = run_scenario(s.machine, s.cfg, s.initial_active, run);
  } catch (const UnrecoverableError& e) {
    std::cerr << "unrecoverable: " << e.what() << "\n";
    return 1;
  } catch (const MaxStepsExceededError& e) {
    std::cerr << "max steps exceeded: " << e.what() << "\n";
    return 1;
  }

  {
    std::ofstream file;
    std::ostream& dest = open_out(o, file);
    dest << trace_to_jsonl(s.machine, trace);
  }

  // The summary goes to stderr when the trace occupies stdout.
  std::ostream& info = o.out.empty() ? std::cerr : std::cout;
  const TraceRecord& last = trace.records.back();
  info << s.name << ": " << trace.kernel_steps << " steps, ";
  if (trace.switch_step)
    info << "switch at record " << *trace.switch_step << " ("
         << policy_name(trace.records[*trace.switch_step].switched->policy) << "), ";
  else
    info << "no switch, ";
  info << (trace.quiescent ? "quiescent" : "stopped") << "\n";
  info << "final: " << valuation_to_string(s.machine, last.valuation);
  for (const auto& [id, value] : last.variants) info << " " << id << "=" << value;
  info << "\n";

  uint64_t violations = 0;
  for (const TraceRecord& r : trace.records)
    if (violated_invariant(s.machine, r.valuation)) ++violations;
  if (violations == 0) {
    info << "safety: invariants hold on all " << trace.records.size()
         << " trace states\n";
    return 0;
  }
  info << "safety: invariants violated on " << violations << " of "
       << trace.records.size() << " trace states\n";
  return 1;
}

int cmd_export(const Options& o) {
  if (o.scenario.empty()) throw ConfigError("export needs --scenario");
  Scenario s = make_scenario(o.scenario, commerce_config(o), mutant_option(o));
  std::ofstream file;
  std::ostream& dest = open_out(o, file);
  dest << machine_to_json(s.machine).dump(2) << "\n";
  return 0;
}

int cmd_import(const Options& o) {
  if (o.machine_file.empty()) throw ConfigError("import needs --machine");
  Machine m = load_machine(o.machine_file);
  std::cout << "imported " << (m.name.empty() ? "machine" : m.name) << ": "
            << m.vars.size() << " variables, " << m.events.size() << " events, "
            << m.systems.size() << " systems\n";
  return 0;
}

int cmd_list() {
  std::cout << "scenarios:";
  for (const std::string& name : scenario_names()) std::cout << " " << name;
  std::cout << "\nmutants:";
  for (const std::string& name : mutant_names()) std::cout << " " << name;
  std::cout << "\npolicies: cold warm hot\n";
  return 0;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const StateCapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnrecoverableError& e) {
    std::cerr << "unrecoverable: " << e.what() << "\n";
    return 1;
  } catch (const MaxStepsExceededError& e) {
    std::cerr << "max steps exceeded: " << e.what() << "\n";
    return 1;
  } catch (const GuardFalseError& e) {
    std::cerr << "violation: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "violation: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    // Config, parse, validation, and sort problems: the run never started.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"guarded-event machines with checked system substitution"};
  app.require_subcommand(1);
  Options o;

  auto add_source = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", o.scenario, "registry scenario name");
    cmd->add_option("--machine", o.machine_file, "machine-definition JSON file");
  };
  auto add_instance = [&](CLI::App* cmd) {
    cmd->add_option("--products", o.products, "number of products (default 5)");
    cmd->add_option("--purchase", o.purchase,
                    "comma-separated products to purchase (default: all)");
    cmd->add_option("--mutate", o.mutate, "inject a documented mutant");
  };

  CLI::App* check = app.add_subcommand("check", "run the obligation checks");
  add_source(check);
  add_instance(check);
  check->add_option("--state-cap", o.state_cap,
                    "exploration state limit (default $SUBST_STATE_CAP or 1000000)");
  check->add_option("--out", o.out, "write the reports to a file");

  CLI::App* simulate = app.add_subcommand("simulate", "run one seeded scenario");
  add_source(simulate);
  add_instance(simulate);
  simulate->add_option("--policy", o.policy, "substitution policy: cold|warm|hot");
  simulate->add_option("--fail-at", o.fail_at, "trigger the failure after K steps");
  simulate->add_option("--fail-when", o.fail_when_file,
                       "trigger the failure when the predicate in this JSON file holds");
  simulate->add_option("--seed", o.seed, "driver seed (default 0)");
  simulate->add_option("--max-steps", o.max_steps, "step budget (default 10000)");
  simulate->add_option("--out", o.out, "write the trace to a file");

  CLI::App* exp = app.add_subcommand("export", "write a scenario's machine as JSON");
  exp->add_option("--scenario", o.scenario, "registry scenario name");
  add_instance(exp);
  exp->add_option("--out", o.out, "write the machine to a file");

  CLI::App* imp = app.add_subcommand("import", "load and validate a machine file");
  imp->add_option("--machine", o.machine_file, "machine-definition JSON file");

  app.add_subcommand("list", "print scenarios, mutants, and policies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (check->parsed()) return guarded([&] { return cmd_check(o); });
  if (simulate->parsed()) return guarded([&] { return cmd_simulate(o); });
  if (exp->parsed()) return guarded([&] { return cmd_export(o); });
  if (imp->parsed()) return guarded([&] { return cmd_import(o); });
  return guarded([] { return cmd_list(); });
}
