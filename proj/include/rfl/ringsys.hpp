#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rfl/molgraph.hpp"

namespace rfl {

inline constexpr std::size_t kDefaultCycleBudget = 100000;

enum class Orientation { Clockwise, TraversalOrder };

/// A simple cycle. bonds[i] joins vertices[i] -> vertices[(i+1) % n].
struct Ring {
  std::vector<VertexId> vertices;
  std::vector<BondKey> bonds;
  Orientation orientation = Orientation::TraversalOrder;

  std::size_t size() const { return vertices.size(); }

  /// Unordered edge set, sorted.
  std::vector<std::pair<VertexId, VertexId>> edges() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    out.reserve(bonds.size());
    for (const BondKey& b : bonds) out.push_back(b.unordered());
    std::sort(out.begin(), out.end());
    return out;
  }

  bool contains_edge(VertexId a, VertexId b) const {
    const std::pair<VertexId, VertexId> e = std::minmax(a, b);
    return std::any_of(bonds.begin(), bonds.end(),
                       [&](const BondKey& k) { return k.unordered() == e; });
  }

  bool operator==(const Ring& other) const {
    return vertices == other.vertices && bonds == other.bonds;
  }
};

/// Per-ring count of other rings sharing at least one bond.
struct RingAdjacency {
  std::vector<int> gamma;
  int operator[](std::size_t i) const { return gamma.at(i); }
  std::size_t size() const { return gamma.size(); }
};

/// Builds a ring from a closed vertex walk, rotated so the smallest id comes
/// first and the smaller of its two ring neighbors second.
inline Ring make_canonical_ring(std::vector<VertexId> cycle) {
  auto min_it = std::min_element(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), min_it, cycle.end());
  if (cycle.size() > 2 && cycle.back() < cycle[1]) {
    std::reverse(cycle.begin() + 1, cycle.end());
  }
  Ring r;
  r.vertices = std::move(cycle);
  const std::size_t n = r.vertices.size();
  r.bonds.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.bonds.push_back({r.vertices[i], r.vertices[(i + 1) % n]});
  }
  return r;
}

namespace detail {

/// Bridges via iterative low-link DFS.
inline std::set<std::pair<VertexId, VertexId>> find_bridges(
    const MolecularGraph& g) {
  std::set<std::pair<VertexId, VertexId>> bridges;
  std::map<VertexId, int> disc;
  std::map<VertexId, int> low;
  int timer = 0;
  struct Frame {
    VertexId v;
    VertexId parent;
    std::vector<VertexId> nbrs;
    std::size_t next = 0;
  };
  for (VertexId root : g.vertex_ids()) {
    if (disc.count(root)) continue;
    std::vector<Frame> stack;
    const auto& rn = g.neighbors(root);
    stack.push_back({root, -1, {rn.begin(), rn.end()}});
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < f.nbrs.size()) {
        VertexId w = f.nbrs[f.next++];
        if (w == f.parent) continue;
        if (disc.count(w)) {
          low[f.v] = std::min(low[f.v], disc[w]);
        } else {
          disc[w] = low[w] = timer++;
          const auto& wn = g.neighbors(w);
          VertexId parent = f.v;
          stack.push_back({w, parent, {wn.begin(), wn.end()}});
        }
      } else {
        const VertexId v = f.v;
        const VertexId p = f.parent;
        stack.pop_back();
        if (p >= 0) {
          low[p] = std::min(low[p], low[v]);
          if (low[v] > disc[p]) bridges.insert(std::minmax(v, p));
        }
      }
    }
  }
  return bridges;
}

}  // namespace detail

/// Every simple cycle exactly once, in canonical rotation, sorted by
/// (length, vertex sequence). Throws BudgetExceeded past `budget` cycles.
inline std::vector<Ring> all_cycles(const MolecularGraph& g,
                                    std::size_t budget = kDefaultCycleBudget) {
  // Cycles never use bridges, so search only the bridgeless remainder.
  const auto bridges = detail::find_bridges(g);
  std::map<VertexId, std::vector<VertexId>> adj;
  for (const Bond& b : g.bonds()) {
    if (bridges.count(b.key().unordered())) continue;
    adj[b.from].push_back(b.to);
    adj[b.to].push_back(b.from);
  }
  for (auto& [v, nbrs] : adj) std::sort(nbrs.begin(), nbrs.end());

  std::vector<Ring> cycles;
  std::set<VertexId> on_path;
  std::vector<VertexId> path;
  // Path explosion guard; cycles are bounded separately by `budget`.
  const std::size_t step_limit = budget * 200 + 100000;
  std::size_t steps = 0;

  for (const auto& [start, start_nbrs] : adj) {
    // DFS over vertices > start; each cycle is found twice (two directions),
    // keep the one whose second vertex is smaller than its last.
    struct Frame {
      VertexId v;
      std::size_t next = 0;
    };
    std::vector<Frame> stack{{start, 0}};
    path.assign(1, start);
    on_path = {start};
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& nbrs = adj[f.v];
      if (f.next >= nbrs.size()) {
        on_path.erase(f.v);
        path.pop_back();
        stack.pop_back();
        continue;
      }
      const VertexId w = nbrs[f.next++];
      if (++steps > step_limit) {
        throw Error(ErrorCode::BudgetExceeded,
                    "cycle search exceeded its step budget");
      }
      if (w == start) {
        if (path.size() >= 3 && path[1] < path.back()) {
          cycles.push_back(make_canonical_ring(path));
          if (cycles.size() > budget) {
            throw Error(ErrorCode::BudgetExceeded,
                        "more than " + std::to_string(budget) + " cycles");
          }
        }
        continue;
      }
      if (w < start || on_path.count(w)) continue;
      on_path.insert(w);
      path.push_back(w);
      stack.push_back({w, 0});
    }
  }
  std::sort(cycles.begin(), cycles.end(), [](const Ring& a, const Ring& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.vertices < b.vertices;
  });
  return cycles;
}

/// Drops every cycle whose edges are all covered by strictly shorter cycles.
/// `cycles` must be sorted by length (as all_cycles returns them).
inline std::vector<Ring> filter_non_nested(const std::vector<Ring>& cycles) {
  std::map<std::pair<VertexId, VertexId>, std::size_t> edge_index;
  for (const Ring& c : cycles) {
    for (const auto& e : c.edges()) edge_index.emplace(e, edge_index.size());
  }
  std::vector<bool> covered(edge_index.size(), false);
  std::vector<Ring> out;
  std::size_t i = 0;
  while (i < cycles.size()) {
    std::size_t j = i;
    while (j < cycles.size() && cycles[j].size() == cycles[i].size()) ++j;
    for (std::size_t k = i; k < j; ++k) {
      const auto edges = cycles[k].edges();
      bool nested = std::all_of(edges.begin(), edges.end(), [&](const auto& e) {
        return covered[edge_index.at(e)];
      });
      if (!nested) out.push_back(cycles[k]);
    }
    for (std::size_t k = i; k < j; ++k) {
      for (const auto& e : cycles[k].edges()) covered[edge_index.at(e)] = true;
    }
    i = j;
  }
  return out;
}

/// The non-nested ring set, ordered by (length, canonical vertex sequence).
inline std::vector<Ring> non_nested_rings(
    const MolecularGraph& g, std::size_t budget = kDefaultCycleBudget) {
  return filter_non_nested(all_cycles(g, budget));
}

inline RingAdjacency ring_adjacency(std::span<const Ring> rings) {
  RingAdjacency adj;
  adj.gamma.assign(rings.size(), 0);
  std::vector<std::vector<std::pair<VertexId, VertexId>>> edges;
  edges.reserve(rings.size());
  for (const Ring& r : rings) edges.push_back(r.edges());
  for (std::size_t i = 0; i < rings.size(); ++i) {
    for (std::size_t j = i + 1; j < rings.size(); ++j) {
      std::vector<std::pair<VertexId, VertexId>> common;
      std::set_intersection(edges[i].begin(), edges[i].end(),
                            edges[j].begin(), edges[j].end(),
                            std::back_inserter(common));
      if (!common.empty()) {
        ++adj.gamma[i];
        ++adj.gamma[j];
      }
    }
  }
  return adj;
}

/// Twice the signed area of the polygon through the ring's coordinates
/// (positive = counter-clockwise), or nullopt if any vertex lacks coords.
inline std::optional<double> signed_area2(const MolecularGraph& g,
                                          const std::vector<VertexId>& cycle) {
  double acc = 0.0;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const auto& a = g.atom(cycle[i]).coords;
    const auto& b = g.atom(cycle[(i + 1) % cycle.size()]).coords;
    if (!a || !b) return std::nullopt;
    acc += a->x * b->y - b->x * a->y;
  }
  return acc;
}

}  // namespace rfl
