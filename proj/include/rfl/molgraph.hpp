#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rfl/error.hpp"

namespace rfl {

using VertexId = std::int32_t;

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3 };

inline int to_int(BondOrder order) { return static_cast<int>(order); }

inline std::optional<BondOrder> bond_order_from_int(int value) {
  if (value < 1 || value > 3) return std::nullopt;
  return static_cast<BondOrder>(value);
}

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Atom {
  VertexId id = 0;
  std::string label;
  std::optional<Point> coords;
  bool operator==(const Atom&) const = default;
};

/// Directed bond reference b_{from,to}. Direction is annotation only.
struct BondKey {
  VertexId from = 0;
  VertexId to = 0;

  BondKey reversed() const { return {to, from}; }
  std::pair<VertexId, VertexId> unordered() const {
    return std::minmax(from, to);
  }
  bool same_edge(const BondKey& other) const {
    return unordered() == other.unordered();
  }
  auto operator<=>(const BondKey&) const = default;
};

struct Bond {
  VertexId from = 0;
  VertexId to = 0;
  BondOrder order = BondOrder::Single;
  bool is_super = false;

  BondKey key() const { return {from, to}; }
  bool operator==(const Bond&) const = default;
};

/// Simple labeled graph of atoms and typed bonds. Vertex ids are stable for
/// the lifetime of the value; removed ids are not reused by add_atom unless
/// they exceed every remaining id.
class MolecularGraph {
 public:
  using Edge = std::pair<VertexId, VertexId>;

  /// Inserts an atom with id = max id + 1 (0 for an empty graph).
  VertexId add_atom(std::string label, std::optional<Point> coords = {}) {
    const VertexId id = next_id();
    nodes_.emplace(id, Node{Atom{id, std::move(label), coords}, {}});
    return id;
  }

  /// Inserts an atom with an explicit id.
  void insert_atom(Atom atom) {
    if (atom.id < 0) {
      throw Error(ErrorCode::UnknownVertex,
                  "negative vertex id " + std::to_string(atom.id));
    }
    const VertexId id = atom.id;
    if (!nodes_.emplace(id, Node{std::move(atom), {}}).second) {
      throw Error(ErrorCode::DuplicateAtom,
                  "duplicate vertex id " + std::to_string(id));
    }
  }

  BondKey add_bond(VertexId from, VertexId to, BondOrder order,
                   bool is_super = false) {
    if (from == to) {
      throw Error(ErrorCode::SelfLoop,
                  "self-loop on vertex " + std::to_string(from));
    }
    auto a = nodes_.find(from);
    auto b = nodes_.find(to);
    if (a == nodes_.end() || b == nodes_.end()) {
      throw Error(ErrorCode::UnknownVertex,
                  "bond " + std::to_string(from) + "-" + std::to_string(to) +
                      " references an unknown vertex");
    }
    const Edge e = std::minmax(from, to);
    if (!bonds_.emplace(e, Bond{from, to, order, is_super}).second) {
      throw Error(ErrorCode::DuplicateBond,
                  "duplicate bond " + std::to_string(from) + "-" +
                      std::to_string(to));
    }
    a->second.nbrs.insert(to);
    b->second.nbrs.insert(from);
    return {from, to};
  }

  void add_bond(const Bond& bond) {
    add_bond(bond.from, bond.to, bond.order, bond.is_super);
  }

  /// Removes the bond on the unordered pair and returns it.
  Bond remove_bond(VertexId a, VertexId b) {
    auto it = bonds_.find(std::minmax(a, b));
    if (it == bonds_.end()) {
      throw Error(ErrorCode::UnknownVertex,
                  "no bond " + std::to_string(a) + "-" + std::to_string(b));
    }
    Bond out = it->second;
    bonds_.erase(it);
    nodes_.at(a).nbrs.erase(b);
    nodes_.at(b).nbrs.erase(a);
    return out;
  }

  /// Removes a vertex and every incident bond.
  void remove_atom(VertexId v) {
    auto it = nodes_.find(v);
    if (it == nodes_.end()) {
      throw Error(ErrorCode::UnknownVertex,
                  "no vertex " + std::to_string(v));
    }
    const std::set<VertexId> nbrs = it->second.nbrs;
    for (VertexId w : nbrs) remove_bond(v, w);
    nodes_.erase(v);
    super_atoms_.erase(v);
  }

  bool has_atom(VertexId v) const { return nodes_.count(v) != 0; }
  bool has_bond(VertexId a, VertexId b) const {
    return bonds_.count(std::minmax(a, b)) != 0;
  }

  const Atom& atom(VertexId v) const { return node(v).atom; }
  Atom& atom(VertexId v) { return node(v).atom; }

  const Bond* find_bond(VertexId a, VertexId b) const {
    auto it = bonds_.find(std::minmax(a, b));
    return it == bonds_.end() ? nullptr : &it->second;
  }
  Bond* find_bond(VertexId a, VertexId b) {
    auto it = bonds_.find(std::minmax(a, b));
    return it == bonds_.end() ? nullptr : &it->second;
  }

  const std::set<VertexId>& neighbors(VertexId v) const {
    return node(v).nbrs;
  }
  std::size_t degree(VertexId v) const { return node(v).nbrs.size(); }

  std::size_t atom_count() const { return nodes_.size(); }
  std::size_t bond_count() const { return bonds_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::vector<VertexId> vertex_ids() const {
    std::vector<VertexId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) out.push_back(id);
    return out;
  }

  std::vector<Atom> atoms() const {
    std::vector<Atom> out;
    out.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) out.push_back(n.atom);
    return out;
  }

  /// Bonds ordered by their unordered key.
  std::vector<Bond> bonds() const {
    std::vector<Bond> out;
    out.reserve(bonds_.size());
    for (const auto& [e, b] : bonds_) out.push_back(b);
    return out;
  }

  VertexId max_id() const {
    return nodes_.empty() ? VertexId{-1} : nodes_.rbegin()->first;
  }
  VertexId next_id() const { return max_id() + 1; }

  const std::set<VertexId>& super_atoms() const { return super_atoms_; }
  void set_super_atom(VertexId v, bool flag = true) {
    node(v);
    if (flag) {
      super_atoms_.insert(v);
    } else {
      super_atoms_.erase(v);
    }
  }

  std::set<Edge> super_bonds() const {
    std::set<Edge> out;
    for (const auto& [e, b] : bonds_) {
      if (b.is_super) out.insert(e);
    }
    return out;
  }

  bool operator==(const MolecularGraph& other) const {
    if (super_atoms_ != other.super_atoms_ || bonds_ != other.bonds_ ||
        nodes_.size() != other.nodes_.size()) {
      return false;
    }
    return std::equal(nodes_.begin(), nodes_.end(), other.nodes_.begin(),
                      [](const auto& a, const auto& b) {
                        return a.first == b.first &&
                               a.second.atom == b.second.atom;
                      });
  }

 private:
  struct Node {
    Atom atom;
    std::set<VertexId> nbrs;
  };

  const Node& node(VertexId v) const {
    auto it = nodes_.find(v);
    if (it == nodes_.end()) {
      throw Error(ErrorCode::UnknownVertex, "no vertex " + std::to_string(v));
    }
    return it->second;
  }
  Node& node(VertexId v) {
    auto it = nodes_.find(v);
    if (it == nodes_.end()) {
      throw Error(ErrorCode::UnknownVertex, "no vertex " + std::to_string(v));
    }
    return it->second;
  }

  std::map<VertexId, Node> nodes_;
  std::map<Edge, Bond> bonds_;
  std::set<VertexId> super_atoms_;
};

/// Copy of `g` with every vertex id replaced by `mapping[id]`.
inline MolecularGraph relabel(const MolecularGraph& g,
                              const std::map<VertexId, VertexId>& mapping) {
  MolecularGraph out;
  for (const Atom& a : g.atoms()) {
    Atom copy = a;
    copy.id = mapping.at(a.id);
    out.insert_atom(std::move(copy));
  }
  for (const Bond& b : g.bonds()) {
    out.add_bond(mapping.at(b.from), mapping.at(b.to), b.order, b.is_super);
  }
  for (VertexId v : g.super_atoms()) out.set_super_atom(mapping.at(v));
  return out;
}

/// Number of connected components.
inline std::size_t component_count(const MolecularGraph& g) {
  std::set<VertexId> seen;
  std::size_t count = 0;
  for (VertexId start : g.vertex_ids()) {
    if (seen.count(start)) continue;
    ++count;
    std::vector<VertexId> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (VertexId w : g.neighbors(v)) {
        if (seen.insert(w).second) stack.push_back(w);
      }
    }
  }
  return count;
}

/// A simple graph is a forest iff |E| = |V| - components.
inline bool is_acyclic(const MolecularGraph& g) {
  return g.bond_count() + component_count(g) == g.atom_count();
}

}  // namespace rfl
