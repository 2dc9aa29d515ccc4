#pragma once

#include "subst/scenario.hpp"

namespace subst {

// The product-selection case study: an abstract one-cart machine, a one-cart
// and a two-cart implementation, their composition, and two substitution
// configurations over the composition.
struct CommerceConfig {
  uint32_t products = 5;
  // Products to purchase, as a mask over the universe; defaults to all.
  std::optional<uint64_t> purchase = std::nullopt;
};

// Seeded defects for demonstrating that the checks catch real violations.
enum class Mutant : uint8_t {
  None,
  DropDisjointnessGuard,  // select2a may pick a product already in C2b
  NonDecreasingSelect,    // select1 may re-add a product (no-op step)
  HinvFalse,              // horizontal invariant forced to false
};

const char* mutant_name(Mutant m);
std::optional<Mutant> mutant_from_name(std::string_view name);
std::vector<std::string> mutant_names();

// Prod1..ProdN. Throws ConfigError unless 1 <= n <= 64.
Universe product_universe(uint32_t n);

// One abstract cart plus a completion flag; select/finish events.
Machine build_m1(const CommerceConfig& cfg);
// One cart C1 on one site, as system Sys1.
std::pair<Machine, SystemDef> build_m11(const CommerceConfig& cfg,
                                        Mutant mutant = Mutant::None);
// Two disjoint carts C2a, C2b on two sites, as system Sys2.
std::pair<Machine, SystemDef> build_m12(const CommerceConfig& cfg,
                                        Mutant mutant = Mutant::None);
// Both systems side by side; the active one is chosen at initialization.
Machine build_m13(const CommerceConfig& cfg, Mutant mutant = Mutant::None);
// Composition plus a cold-restart substitution Sys1 -> Sys2.
std::pair<Machine, SubstitutionConfig> build_m141(const CommerceConfig& cfg,
                                                  Mutant mutant = Mutant::None);
// Composition plus a hot substitution recovering Sys2 state under the
// horizontal invariant C1 = C2a ∪ C2b.
std::pair<Machine, SubstitutionConfig> build_m142(const CommerceConfig& cfg,
                                                  Mutant mutant = Mutant::None);

RefinementLink link_m1_m11(const CommerceConfig& cfg, Mutant mutant = Mutant::None);
RefinementLink link_m1_m12(const CommerceConfig& cfg, Mutant mutant = Mutant::None);

// A named, runnable instance: the machine, its substitution configuration if
// any, the initially active system, and the refinements it must satisfy.
struct Scenario {
  std::string name;
  Machine machine;
  std::optional<SubstitutionConfig> cfg;
  std::string initial_active;
  std::vector<RefinementLink> refinements;
};

std::vector<std::string> scenario_names();

// Builds a registry scenario. Throws ConfigError for unknown names and for
// mutants that do not apply to the scenario.
Scenario make_scenario(std::string_view name, const CommerceConfig& cfg,
                       Mutant mutant = Mutant::None);

}  // namespace subst
