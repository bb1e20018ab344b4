#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfl/error.hpp"
#include "rfl/molgraph.hpp"

namespace rfl {

namespace detail {

[[noreturn]] inline void smiles_error(ErrorCode code, const std::string& msg,
                                      std::size_t pos) {
  throw Error(code, "at byte " + std::to_string(pos) + ": " + msg, pos);
}

[[noreturn]] inline void smiles_unsupported(std::string_view s,
                                            std::size_t i, const char* what) {
  smiles_error(ErrorCode::UnsupportedFeature,
               std::string(what) + " '" + s[i] + "' is not supported", i);
}

}  // namespace detail

/// Reads the SMILES subset: B C N O P S F Cl Br I, branches, ring closures
/// 1-9, bonds - = #, and '.' between components. Hydrogens stay implicit.
inline MolecularGraph import_smiles_subset(std::string_view s) {
  using detail::smiles_error;
  MolecularGraph g;
  std::optional<VertexId> prev;
  std::optional<BondOrder> bond;
  std::size_t bond_pos = 0;
  std::vector<std::optional<VertexId>> branches;
  struct Open {
    VertexId atom;
    std::optional<BondOrder> order;
    std::size_t pos;
  };
  std::array<std::optional<Open>, 10> rings{};

  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    std::string label;
    switch (c) {
      case 'C':
        label = i + 1 < s.size() && s[i + 1] == 'l' ? "Cl" : "C";
        break;
      case 'B':
        label = i + 1 < s.size() && s[i + 1] == 'r' ? "Br" : "B";
        break;
      case 'N': case 'O': case 'P': case 'S': case 'F': case 'I':
        label = std::string(1, c);
        break;
      default:
        break;
    }
    if (!label.empty()) {
      const VertexId v = g.add_atom(label);
      if (prev) {
        g.add_bond(*prev, v, bond.value_or(BondOrder::Single));
      } else if (bond) {
        smiles_error(ErrorCode::ParseError, "bond without a preceding atom",
                     bond_pos);
      }
      prev = v;
      bond.reset();
      i += label.size();
      continue;
    }
    switch (c) {
      case '-': case '=': case '#':
        if (bond) smiles_error(ErrorCode::ParseError, "two bonds in a row", i);
        if (!prev) {
          smiles_error(ErrorCode::ParseError, "bond without a preceding atom",
                       i);
        }
        bond = c == '-' ? BondOrder::Single
             : c == '=' ? BondOrder::Double
                        : BondOrder::Triple;
        bond_pos = i;
        break;
      case '(':
        if (!prev || bond) {
          smiles_error(ErrorCode::ParseError, "branch must follow an atom", i);
        }
        branches.push_back(prev);
        break;
      case ')':
        if (branches.empty()) {
          smiles_error(ErrorCode::ParseError, "unmatched ')'", i);
        }
        if (bond) smiles_error(ErrorCode::ParseError, "dangling bond", bond_pos);
        prev = branches.back();
        branches.pop_back();
        break;
      case '.':
        if (!prev || bond || !branches.empty()) {
          smiles_error(ErrorCode::ParseError, "misplaced '.'", i);
        }
        prev.reset();
        break;
      case '0':
        detail::smiles_unsupported(s, i, "ring closure digit");
      case '1': case '2': case '3': case '4': case '5':
      case '6': case '7': case '8': case '9': {
        if (!prev) smiles_error(ErrorCode::ParseError, "ring closure without atom", i);
        auto& slot = rings[static_cast<std::size_t>(c - '0')];
        if (!slot) {
          slot = Open{*prev, bond, i};
        } else {
          if (slot->order && bond && *slot->order != *bond) {
            smiles_error(ErrorCode::ParseError,
                         "ring closure bonds disagree", i);
          }
          const BondOrder order =
              bond.value_or(slot->order.value_or(BondOrder::Single));
          if (slot->atom == *prev || g.has_bond(slot->atom, *prev)) {
            smiles_error(ErrorCode::ParseError,
                         "ring closure duplicates an existing bond", i);
          }
          g.add_bond(slot->atom, *prev, order);
          slot.reset();
        }
        bond.reset();
        break;
      }
      case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
        detail::smiles_unsupported(s, i, "aromatic atom");
      case '[':
        detail::smiles_unsupported(s, i, "bracket atom");
      case '+':
        detail::smiles_unsupported(s, i, "charge");
      case '/': case '\\': case '@':
        detail::smiles_unsupported(s, i, "stereo marker");
      case '%':
        detail::smiles_unsupported(s, i, "two-digit ring closure");
      case ':':
        detail::smiles_unsupported(s, i, "aromatic bond");
      case '$':
        detail::smiles_unsupported(s, i, "quadruple bond");
      case '*':
        detail::smiles_unsupported(s, i, "wildcard atom");
      default:
        smiles_error(ErrorCode::ParseError,
                     std::string("unexpected character '") + c + "'", i);
    }
    ++i;
  }
  if (bond) smiles_error(ErrorCode::ParseError, "dangling bond", bond_pos);
  if (!branches.empty()) {
    smiles_error(ErrorCode::ParseError, "unclosed '('", s.size());
  }
  for (const auto& slot : rings) {
    if (slot) {
      smiles_error(ErrorCode::ParseError, "unclosed ring closure", slot->pos);
    }
  }
  if (g.empty()) smiles_error(ErrorCode::ParseError, "empty SMILES", 0);
  return g;
}

}  // namespace rfl
