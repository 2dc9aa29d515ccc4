#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subst/errors.hpp"

namespace subst {

// Sorts of values and expressions. State variables are declared as Nat, Bool
// or Set; Atom values only arise transiently from event parameters and bound
// quantifier variables.
enum class Kind : uint8_t { Nat, Bool, Set, Atom };

const char* kind_name(Kind k);

// The declared finite universe of atoms. Sets are bitmasks over it, so a
// universe holds at most 64 atoms.
class Universe {
 public:
  Universe() = default;
  explicit Universe(std::vector<std::string> atoms);

  size_t size() const { return atoms_.size(); }
  const std::string& atom_name(uint32_t index) const { return atoms_.at(index); }
  std::optional<uint32_t> index_of(std::string_view name) const;
  uint32_t require_index(std::string_view name) const;
  uint64_t full_mask() const;
  const std::vector<std::string>& atoms() const { return atoms_; }

 private:
  std::vector<std::string> atoms_;
};

// A single tagged value. Nat and Atom payloads live in `raw` directly; Set
// payloads are bitmasks over the universe.
struct Value {
  Kind kind = Kind::Nat;
  uint64_t raw = 0;

  static Value nat(uint64_t n) { return {Kind::Nat, n}; }
  static Value boolean(bool b) { return {Kind::Bool, b ? 1u : 0u}; }
  static Value set(uint64_t mask) { return {Kind::Set, mask}; }
  static Value atom(uint32_t index) { return {Kind::Atom, index}; }

  uint64_t as_nat() const;
  bool as_bool() const;
  uint64_t as_set() const;
  uint32_t as_atom() const;

  bool operator==(const Value&) const = default;
};

// Canonical strict order on same-kind values, used wherever a deterministic
// choice or a sorted listing is required. Nat and Atom compare numerically,
// Bool orders false before true. Sets compare as ascending atom lists padded
// past the end with a sentinel, so a set orders before every proper subset of
// itself: {Prod1,Prod3} < {Prod1} < {Prod3} < {}.
bool value_less(const Value& a, const Value& b);

std::string value_to_string(const Value& v, const Universe& u);

// Iterate the atom indices of a set mask in ascending order.
template <typename Fn>
void for_each_atom(uint64_t mask, Fn&& fn) {
  while (mask != 0) {
    uint32_t index = static_cast<uint32_t>(__builtin_ctzll(mask));
    fn(index);
    mask &= mask - 1;
  }
}

}  // namespace subst
