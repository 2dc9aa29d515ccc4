#pragma once

#include <json.hpp>

#include "subst/machine.hpp"

namespace subst {

using Json = nlohmann::ordered_json;

// Machine-definition file format. Parsing is strict: unknown fields raise
// ParseError. machine_from_json validates the result before returning it.
Json machine_to_json(const Machine& m);
Machine machine_from_json(const Json& j);

Json expr_to_json(const Expr& e, const Universe& u);
ExprPtr expr_from_json(const Json& j, const Universe& u);

// Value literals: nat as number, bool as true/false, set as an atom-name
// array in universe order, atom as its name.
Json value_to_json(const Value& v, const Universe& u);

// Valuations serialize as {variable: literal} with sets as atom-name arrays
// in universe order.
Json valuation_to_json(const Machine& m, const Valuation& v);
Valuation valuation_from_json(const Machine& m, const Json& j);

Machine load_machine(const std::string& path);
void save_machine(const Machine& m, const std::string& path);

}  // namespace subst
