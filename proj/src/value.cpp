#include "subst/value.hpp"

#include <algorithm>

namespace subst {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Nat:
      return "nat";
    case Kind::Bool:
      return "bool";
    case Kind::Set:
      return "atomset";
    case Kind::Atom:
      return "atom";
  }
  return "?";
}

Universe::Universe(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.size() > 64)
    throw ValidationError("universe holds " + std::to_string(atoms_.size()) +
                          " atoms; at most 64 are supported");
  for (size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].empty()) throw ValidationError("empty atom name in universe");
    for (size_t j = i + 1; j < atoms_.size(); ++j)
      if (atoms_[i] == atoms_[j])
        throw ValidationError("duplicate atom '" + atoms_[i] + "' in universe");
  }
}

std::optional<uint32_t> Universe::index_of(std::string_view name) const {
  for (size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i] == name) return static_cast<uint32_t>(i);
  return std::nullopt;
}

uint32_t Universe::require_index(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw ValidationError("atom '" + std::string(name) + "' is not in the universe");
  return *i;
}

uint64_t Universe::full_mask() const {
  return atoms_.size() == 64 ? ~uint64_t{0} : (uint64_t{1} << atoms_.size()) - 1;
}

uint64_t Value::as_nat() const {
  if (kind != Kind::Nat) throw SortError("expected nat value, got " + std::string(kind_name(kind)));
  return raw;
}

bool Value::as_bool() const {
  if (kind != Kind::Bool) throw SortError("expected bool value, got " + std::string(kind_name(kind)));
  return raw != 0;
}

uint64_t Value::as_set() const {
  if (kind != Kind::Set) throw SortError("expected atomset value, got " + std::string(kind_name(kind)));
  return raw;
}

uint32_t Value::as_atom() const {
  if (kind != Kind::Atom) throw SortError("expected atom value, got " + std::string(kind_name(kind)));
  return static_cast<uint32_t>(raw);
}

namespace {

// Ascending-atom-list comparison with an implicit sentinel past the end:
// when one list is a strict prefix of the other, the longer list is smaller.
int compare_sets(uint64_t a, uint64_t b) {
  while (a != 0 && b != 0) {
    uint32_t la = static_cast<uint32_t>(__builtin_ctzll(a));
    uint32_t lb = static_cast<uint32_t>(__builtin_ctzll(b));
    if (la != lb) return la < lb ? -1 : 1;
    a &= a - 1;
    b &= b - 1;
  }
  if (a == b) return 0;
  return a != 0 ? -1 : 1;
}

}  // namespace

bool value_less(const Value& a, const Value& b) {
  if (a.kind != b.kind)
    throw SortError(std::string("cannot order ") + kind_name(a.kind) + " against " +
                    kind_name(b.kind));
  if (a.kind == Kind::Set) return compare_sets(a.raw, b.raw) < 0;
  return a.raw < b.raw;
}

std::string value_to_string(const Value& v, const Universe& u) {
  switch (v.kind) {
    case Kind::Nat:
      return std::to_string(v.raw);
    case Kind::Bool:
      return v.raw != 0 ? "true" : "false";
    case Kind::Atom:
      return u.atom_name(static_cast<uint32_t>(v.raw));
    case Kind::Set: {
      std::string out = "{";
      bool first = true;
      for_each_atom(v.raw, [&](uint32_t i) {
        if (!first) out += ",";
        out += u.atom_name(i);
        first = false;
      });
      out += "}";
      return out;
    }
  }
  return "?";
}

}  // namespace subst
