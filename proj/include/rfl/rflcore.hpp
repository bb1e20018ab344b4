#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rfl/isomorphism.hpp"
#include "rfl/molgraph.hpp"
#include "rfl/ringsys.hpp"

namespace rfl {

inline constexpr const char* kSuperAtomLabel = "[Sa]";

/// A ring removed from the graph during splitting, in stored orientation.
/// bonds[i] joins atoms[i] -> atoms[(i+1) % n]. For rings collapsed into a
/// SuperBond the closing bond atoms[n-1] -> atoms[0] is the shared bond kept
/// in the graph.
struct StoredRing {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  Orientation orientation = Orientation::TraversalOrder;

  std::size_t size() const { return atoms.size(); }

  std::optional<std::size_t> index_of(VertexId v) const {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].id == v) return i;
    }
    return std::nullopt;
  }

  /// Index of the ring bond on the unordered pair {a, b}.
  std::optional<std::size_t> bond_index(VertexId a, VertexId b) const {
    const std::pair<VertexId, VertexId> e = std::minmax(a, b);
    for (std::size_t i = 0; i < bonds.size(); ++i) {
      if (bonds[i].key().unordered() == e) return i;
    }
    return std::nullopt;
  }

  bool operator==(const StoredRing&) const = default;
};

enum class SuperKind { Atom, Bond };

struct SuperAtomRef {
  VertexId vertex = 0;
  std::size_t ring_index = 0;
  bool operator==(const SuperAtomRef&) const = default;
};

struct SuperBondRef {
  BondKey bond;
  std::size_t ring_index = 0;
  bool operator==(const SuperBondRef&) const = default;
};

/// One element of F: skeleton bond b_{x,d} glued to ring bond b_{d,w}.
struct BranchLink {
  BondKey skeleton_bond;
  BondKey ring_bond;
  std::size_t ring_index = 0;
  auto operator<=>(const BranchLink&) const = default;
};

/// Bookkeeping for one merge iteration.
struct MergeStep {
  std::size_t ring_index = 0;
  SuperKind kind = SuperKind::Atom;
  std::vector<int> gammas;  // gamma of every ring in R at this iteration
  std::size_t chosen = 0;   // position of the merged ring in that R
};

struct SplitResult {
  MolecularGraph skeleton;
  std::vector<StoredRing> rings;  // merge order
  std::vector<BranchLink> branches;
  std::vector<SuperAtomRef> super_atoms;
  std::vector<SuperBondRef> super_bonds;
  std::vector<MergeStep> trace;

  std::vector<BranchLink> branches_of(std::size_t ring_index) const {
    std::vector<BranchLink> out;
    for (const BranchLink& l : branches) {
      if (l.ring_index == ring_index) out.push_back(l);
    }
    return out;
  }
};

struct SplitOptions {
  std::size_t cycle_budget = kDefaultCycleBudget;
};

namespace detail {

using Edge = std::pair<VertexId, VertexId>;

inline Edge edge_of(VertexId a, VertexId b) { return std::minmax(a, b); }

/// How one merge step relocates vertices: every deleted vertex maps to the
/// SuperAtom, or to the nearer end of the kept SuperBond along the ring path
/// (ties go to atoms[0]).
struct MergeMap {
  const StoredRing* ring = nullptr;
  SuperKind kind = SuperKind::Atom;
  VertexId super_atom = -1;
  BondKey super_bond;
  std::set<VertexId> vertices;
  std::set<VertexId> deleted;

  VertexId target(VertexId w) const {
    if (kind == SuperKind::Atom) return super_atom;
    const std::size_t n = ring->size();
    const std::size_t i = *ring->index_of(w);
    return i <= n - 1 - i ? ring->atoms.front().id : ring->atoms.back().id;
  }
};

inline MergeMap make_merge_map(const StoredRing& ring, SuperKind kind,
                               VertexId super_atom, BondKey super_bond) {
  MergeMap m;
  m.ring = &ring;
  m.kind = kind;
  m.super_atom = super_atom;
  m.super_bond = super_bond;
  for (const Atom& a : ring.atoms) m.vertices.insert(a.id);
  if (kind == SuperKind::Atom) {
    m.deleted = m.vertices;
  } else {
    for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
      m.deleted.insert(ring.atoms[i].id);
    }
  }
  return m;
}

inline std::vector<MergeMap> merge_maps(const SplitResult& sr) {
  const std::size_t k_rings = sr.rings.size();
  std::vector<int> refs(k_rings, 0);
  std::vector<MergeMap> maps(k_rings);
  std::vector<std::optional<VertexId>> sa(k_rings);
  std::vector<std::optional<BondKey>> sb(k_rings);
  for (const SuperAtomRef& r : sr.super_atoms) {
    if (r.ring_index >= k_rings) {
      throw Error(ErrorCode::UnknownSuper,
                  "SuperAtom references ring " + std::to_string(r.ring_index));
    }
    ++refs[r.ring_index];
    sa[r.ring_index] = r.vertex;
  }
  for (const SuperBondRef& r : sr.super_bonds) {
    if (r.ring_index >= k_rings) {
      throw Error(ErrorCode::UnknownSuper,
                  "SuperBond references ring " + std::to_string(r.ring_index));
    }
    ++refs[r.ring_index];
    sb[r.ring_index] = r.bond;
  }
  for (std::size_t k = 0; k < k_rings; ++k) {
    const StoredRing& ring = sr.rings[k];
    if (refs[k] != 1) {
      throw Error(ErrorCode::UnknownSuper,
                  "ring " + std::to_string(k) + " has " +
                      std::to_string(refs[k]) + " super references");
    }
    if (ring.size() < 3 || ring.bonds.size() != ring.size()) {
      throw Error(ErrorCode::MalformedGraph,
                  "ring " + std::to_string(k) + " is not a cycle");
    }
    if (sa[k]) {
      maps[k] = make_merge_map(ring, SuperKind::Atom, *sa[k], {});
    } else {
      const BondKey expect{ring.atoms.front().id, ring.atoms.back().id};
      if (*sb[k] != expect) {
        throw Error(ErrorCode::UnknownSuper,
                    "SuperBond of ring " + std::to_string(k) +
                        " does not match its closing bond");
      }
      maps[k] = make_merge_map(ring, SuperKind::Bond, -1, *sb[k]);
    }
  }
  return maps;
}

/// A tracked bond relocated by one merge: endpoint i of `before` becomes
/// endpoint i of `after`.
struct BondMove {
  Edge before;
  Edge after;
};

/// Where a tracked bond sits once splitting is complete.
struct BondHome {
  bool in_skeleton = true;
  std::size_t ring_index = 0;  // when !in_skeleton
  std::size_t bond_index = 0;  // when !in_skeleton
  Edge ends;                   // positions at home (unordered)
};

/// Final place of a SuperBond, and where its atoms[0] end went.
struct SuperBondHome {
  BondHome home;
  VertexId u_end = -1;
};

struct Trajectories {
  std::vector<std::vector<BondMove>> moves;  // per merge index
  std::vector<BondHome> link_home;           // per entry of branches
  std::vector<std::size_t> link_group;       // per entry of branches
  std::vector<std::optional<SuperBondHome>> super_home;  // per ring
};

/// Replays every relocation of tracked bonds (those named by F, and every
/// SuperBond) through the merge sequence, using only the stored rings and
/// super references.
inline Trajectories track_branches(const SplitResult& sr,
                                   const std::vector<MergeMap>& maps) {
  struct Group {
    VertexId a;
    VertexId b;
    bool active = true;
    BondHome home;
    std::optional<std::size_t> super_ring;
    bool u_is_a = true;
  };
  Trajectories out;
  out.moves.resize(sr.rings.size());
  out.link_home.resize(sr.branches.size());
  out.link_group.resize(sr.branches.size());
  out.super_home.resize(sr.rings.size());
  std::vector<Group> groups;

  std::vector<std::vector<std::size_t>> links_at(sr.rings.size());
  for (std::size_t i = 0; i < sr.branches.size(); ++i) {
    const std::size_t k = sr.branches[i].ring_index;
    if (k >= sr.rings.size()) {
      throw Error(ErrorCode::LeftoverBranch,
                  "branch link references ring " + std::to_string(k) +
                      " but only " + std::to_string(sr.rings.size()) +
                      " rings exist");
    }
    links_at[k].push_back(i);
  }

  for (std::size_t k = 0; k < sr.rings.size(); ++k) {
    const MergeMap& mm = maps[k];
    std::map<Edge, std::size_t> before;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      Group& g = groups[gi];
      if (!g.active) continue;
      before[edge_of(g.a, g.b)] = gi;
      const bool a_in = mm.vertices.count(g.a) != 0;
      const bool b_in = mm.vertices.count(g.b) != 0;
      if (a_in && b_in) {
        if (mm.kind == SuperKind::Bond &&
            edge_of(g.a, g.b) == mm.super_bond.unordered()) {
          continue;
        }
        auto idx = mm.ring->bond_index(g.a, g.b);
        if (!idx) {
          throw Error(ErrorCode::DanglingBranch,
                      "tracked bond " + std::to_string(g.a) + "-" +
                          std::to_string(g.b) + " is a chord of ring " +
                          std::to_string(k));
        }
        g.active = false;
        g.home = {false, k, *idx, edge_of(g.a, g.b)};
        continue;
      }
      VertexId na = g.a;
      VertexId nb = g.b;
      if (mm.deleted.count(g.a)) na = mm.target(g.a);
      if (mm.deleted.count(g.b)) nb = mm.target(g.b);
      if (na != g.a || nb != g.b) {
        out.moves[k].push_back({{g.a, g.b}, {na, nb}});
        g.a = na;
        g.b = nb;
      }
    }
    for (std::size_t li : links_at[k]) {
      const BranchLink& link = sr.branches[li];
      const VertexId x = link.skeleton_bond.from;
      const VertexId d = link.skeleton_bond.to;
      if (link.ring_bond.from != d || !mm.deleted.count(d) ||
          mm.vertices.count(x) ||
          mm.ring->index_of(d).value_or(mm.ring->size()) >= mm.ring->size()) {
        throw Error(ErrorCode::DanglingBranch,
                    "branch link (" + std::to_string(x) + "," +
                        std::to_string(d) + ") has no anchor in ring " +
                        std::to_string(k));
      }
      const std::size_t di = *mm.ring->index_of(d);
      const Bond& rb = mm.ring->bonds[di];
      if (rb.from != d || rb.to != link.ring_bond.to) {
        throw Error(ErrorCode::DanglingBranch,
                    "ring bond of link (" + std::to_string(x) + "," +
                        std::to_string(d) + ") is not the bond leaving " +
                        std::to_string(d) + " in ring " + std::to_string(k));
      }
      auto it = before.find(edge_of(x, d));
      if (it != before.end()) {
        out.link_group[li] = it->second;
        continue;
      }
      const VertexId t = mm.target(d);
      out.moves[k].push_back({{x, d}, {x, t}});
      groups.push_back({x, t, true, {}, std::nullopt, true});
      out.link_group[li] = groups.size() - 1;
      before[edge_of(x, d)] = groups.size() - 1;
    }
    if (mm.kind == SuperKind::Bond) {
      const VertexId u = mm.super_bond.from;
      const VertexId v = mm.super_bond.to;
      auto same = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
        return g.active && edge_of(g.a, g.b) == edge_of(u, v);
      });
      if (same == groups.end()) {
        groups.push_back({u, v, true, {}, k, true});
      } else {
        same->super_ring = k;
        same->u_is_a = same->a == u;
      }
    }
  }
  for (Group& g : groups) {
    if (g.active) g.home = {true, 0, 0, edge_of(g.a, g.b)};
    if (g.super_ring) {
      out.super_home[*g.super_ring] =
          SuperBondHome{g.home, g.u_is_a ? g.a : g.b};
    }
  }
  for (std::size_t li = 0; li < sr.branches.size(); ++li) {
    out.link_home[li] = groups[out.link_group[li]].home;
  }
  return out;
}

struct MergeOutcome {
  MolecularGraph graph;
  std::map<Edge, std::pair<bool, bool>> moved;
  StoredRing stored;
  std::vector<BranchLink> links;
  VertexId super_atom = -1;
  BondKey super_bond;
};

/// Rotates an oriented cycle so that {cycle[n-1], cycle[0]} is the given edge
/// traversed as cycle[n-1] -> cycle[0].
inline std::vector<VertexId> rotate_to_closing(std::vector<VertexId> cycle,
                                               Edge shared) {
  const std::size_t n = cycle.size();
  for (std::size_t t = 0; t < n; ++t) {
    if (edge_of(cycle[t], cycle[(t + 1) % n]) == shared) {
      std::rotate(cycle.begin(), cycle.begin() + (t + 1) % n, cycle.end());
      return cycle;
    }
  }
  throw Error(ErrorCode::MalformedGraph, "shared bond is not on the ring");
}

inline std::optional<MergeOutcome> try_merge(
    const MolecularGraph& g,
    const std::map<Edge, std::pair<bool, bool>>& moved,
    std::vector<VertexId> cycle, Orientation orientation, SuperKind kind,
    std::optional<Edge> shared, std::size_t ring_index, VertexId fresh_id) {
  MergeOutcome out;
  const std::size_t n = cycle.size();
  if (kind == SuperKind::Atom) {
    auto m = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), m, cycle.end());
  } else {
    cycle = rotate_to_closing(std::move(cycle), *shared);
  }
  out.stored.orientation = orientation;
  for (std::size_t i = 0; i < n; ++i) {
    out.stored.atoms.push_back(g.atom(cycle[i]));
    const VertexId a = cycle[i];
    const VertexId b = cycle[(i + 1) % n];
    const Bond* bond = g.find_bond(a, b);
    out.stored.bonds.push_back({a, b, bond->order, bond->is_super});
  }

  std::optional<VertexId> sa;
  if (kind == SuperKind::Atom) sa = fresh_id;
  const MergeMap mm = make_merge_map(
      out.stored, kind, sa.value_or(-1),
      kind == SuperKind::Bond ? BondKey{cycle.front(), cycle.back()}
                              : BondKey{});

  struct External {
    VertexId w;
    VertexId y;
    Bond bond;
  };
  std::vector<External> external;
  for (VertexId w : mm.deleted) {
    for (VertexId y : g.neighbors(w)) {
      if (mm.vertices.count(y)) {
        if (!out.stored.bond_index(w, y)) {
          throw Error(ErrorCode::MalformedGraph,
                      "chord " + std::to_string(w) + "-" + std::to_string(y) +
                          " inside a non-nested ring");
        }
        continue;
      }
      external.push_back({w, y, *g.find_bond(w, y)});
    }
  }

  out.graph = g;
  out.moved = moved;
  for (const Bond& b : out.stored.bonds) {
    if (kind == SuperKind::Bond &&
        b.key().unordered() == mm.super_bond.unordered()) {
      continue;
    }
    out.moved.erase(b.key().unordered());
  }
  for (const External& e : external) out.moved.erase(edge_of(e.w, e.y));
  for (VertexId w : mm.deleted) out.graph.remove_atom(w);

  if (sa) {
    std::optional<Point> centroid = Point{};
    for (const Atom& a : out.stored.atoms) {
      if (!a.coords) {
        centroid.reset();
        break;
      }
      centroid->x += a.coords->x / static_cast<double>(n);
      centroid->y += a.coords->y / static_cast<double>(n);
    }
    out.graph.insert_atom({*sa, kSuperAtomLabel, centroid});
    out.graph.set_super_atom(*sa);
    out.super_atom = *sa;
  }

  for (const External& e : external) {
    const VertexId t = mm.target(e.w);
    if (t == e.y || out.graph.has_bond(t, e.y)) {
      return std::nullopt;
    }
    const bool w_is_from = e.bond.from == e.w;
    Bond nb = e.bond;
    if (w_is_from) {
      nb.from = t;
    } else {
      nb.to = t;
    }
    out.graph.add_bond(nb);

    // moved flags are stored in (min, max) order of the edge
    const Edge old_edge = edge_of(e.w, e.y);
    std::pair<bool, bool> flags{false, false};
    if (auto it = moved.find(old_edge); it != moved.end()) flags = it->second;
    const bool w_is_min = old_edge.first == e.w;
    const bool w_moved = w_is_min ? flags.first : flags.second;
    const bool y_moved = w_is_min ? flags.second : flags.first;
    if (!w_moved) {
      const std::size_t di = *out.stored.index_of(e.w);
      out.links.push_back({{e.y, e.w},
                           {e.w, out.stored.atoms[(di + 1) % n].id},
                           ring_index});
    }
    const Edge new_edge = edge_of(t, e.y);
    out.moved[new_edge] = new_edge.first == t ? std::pair{true, y_moved}
                                              : std::pair{y_moved, true};
  }

  if (kind == SuperKind::Bond) {
    Bond* kept = out.graph.find_bond(cycle.front(), cycle.back());
    kept->from = cycle.front();
    kept->to = cycle.back();
    kept->is_super = true;
    out.super_bond = {cycle.front(), cycle.back()};
    // later moves of a SuperBond end are always recorded in F
    out.moved[edge_of(cycle.front(), cycle.back())] = {false, false};
  }

  std::sort(out.links.begin(), out.links.end(),
            [&](const BranchLink& a, const BranchLink& b) {
              const auto ia = *out.stored.index_of(a.ring_bond.from);
              const auto ib = *out.stored.index_of(b.ring_bond.from);
              if (ia != ib) return ia < ib;
              return a.skeleton_bond.from < b.skeleton_bond.from;
            });
  return out;
}

/// Cycle order used for storage: clockwise when every vertex has
/// coordinates (and the polygon is not degenerate), else the canonical
/// traversal (smallest id first, toward its smaller neighbor).
inline std::pair<std::vector<VertexId>, Orientation> orient(
    const MolecularGraph& g, const Ring& ring) {
  std::vector<VertexId> cycle = ring.vertices;
  auto area = signed_area2(g, cycle);
  if (!area || *area == 0.0) return {cycle, Orientation::TraversalOrder};
  if (*area > 0.0) std::reverse(cycle.begin() + 1, cycle.end());
  return {cycle, Orientation::Clockwise};
}

}  // namespace detail

/// Splits a molecular graph into a ring-free skeleton, the rings removed in
/// merge order, and the branch links that glue them back together.
///
/// Each iteration recomputes the non-nested ring set and gamma on the current
/// graph and merges the ring with the smallest gamma (ties: first in ring
/// order). gamma = 0 rings become a fresh SuperAtom vertex; otherwise the ring
/// is reduced to one bond shared with the neighbor of highest gamma.
inline SplitResult split(const MolecularGraph& input,
                         const SplitOptions& options = {}) {
  SplitResult out;
  MolecularGraph g;
  for (const Atom& a : input.atoms()) g.insert_atom(a);
  for (Bond b : input.bonds()) {
    b.is_super = false;
    g.add_bond(b);
  }
  std::map<detail::Edge, std::pair<bool, bool>> moved;
  // SuperAtom ids are never reused, even after their vertex is merged away
  VertexId fresh_id = g.next_id();

  while (true) {
    const std::vector<Ring> rings = non_nested_rings(g, options.cycle_budget);
    if (rings.empty()) break;
    const RingAdjacency adj = ring_adjacency(rings);
    const std::size_t chosen = static_cast<std::size_t>(
        std::min_element(adj.gamma.begin(), adj.gamma.end()) -
        adj.gamma.begin());
    const Ring& ring = rings[chosen];
    auto [cycle, orientation] = detail::orient(g, ring);
    const std::size_t k = out.rings.size();

    std::optional<detail::MergeOutcome> merged;
    SuperKind kind = SuperKind::Atom;
    if (adj[chosen] > 0) {
      std::optional<detail::Edge> best;
      int best_gamma = -1;
      for (std::size_t j = 0; j < rings.size(); ++j) {
        if (j == chosen) continue;
        for (const auto& e : ring.edges()) {
          if (!rings[j].contains_edge(e.first, e.second)) continue;
          if (g.find_bond(e.first, e.second)->is_super) continue;
          if (adj[j] > best_gamma || (adj[j] == best_gamma && e < *best)) {
            best = e;
            best_gamma = adj[j];
          }
        }
      }
      if (best) {
        merged = detail::try_merge(g, moved, cycle, orientation,
                                   SuperKind::Bond, best, k, fresh_id);
        if (merged) kind = SuperKind::Bond;
      }
    }
    if (!merged) {
      merged = detail::try_merge(g, moved, cycle, orientation,
                                 SuperKind::Atom, std::nullopt, k, fresh_id);
      kind = SuperKind::Atom;
    }
    if (!merged) {
      throw Error(ErrorCode::MalformedGraph,
                  "merging ring " + std::to_string(k) +
                      " would create parallel bonds");
    }

    out.rings.push_back(std::move(merged->stored));
    out.branches.insert(out.branches.end(), merged->links.begin(),
                        merged->links.end());
    if (kind == SuperKind::Atom) {
      ++fresh_id;
      out.super_atoms.push_back({merged->super_atom, k});
    } else {
      out.super_bonds.push_back({merged->super_bond, k});
    }
    out.trace.push_back({k, kind, adj.gamma, chosen});
    g = std::move(merged->graph);
    moved = std::move(merged->moved);
  }
  out.skeleton = std::move(g);
  return out;
}

/// Inverse of split: rings are restored in reverse merge order, each
/// SuperAtom/SuperBond replaced by its ring and every relocated bond moved
/// back, consuming F.
inline MolecularGraph restore(const SplitResult& sr) {
  const auto maps = detail::merge_maps(sr);
  const auto traj = detail::track_branches(sr, maps);
  std::map<VertexId, std::size_t> super_atom_ring;
  for (const SuperAtomRef& r : sr.super_atoms) {
    super_atom_ring[r.vertex] = r.ring_index;
  }

  MolecularGraph g = sr.skeleton;
  for (std::size_t step = sr.rings.size(); step-- > 0;) {
    const StoredRing& ring = sr.rings[step];
    const detail::MergeMap& mm = maps[step];
    for (const Atom& a : ring.atoms) {
      if (!mm.deleted.count(a.id)) {
        if (!g.has_atom(a.id)) {
          throw Error(ErrorCode::UnknownSuper,
                      "SuperBond end " + std::to_string(a.id) +
                          " of ring " + std::to_string(step) +
                          " is not in the graph");
        }
        continue;
      }
      if (g.has_atom(a.id)) {
        throw Error(ErrorCode::MalformedGraph,
                    "ring " + std::to_string(step) + " vertex " +
                        std::to_string(a.id) + " already present");
      }
      g.insert_atom(a);
      if (super_atom_ring.count(a.id)) g.set_super_atom(a.id);
    }
    if (mm.kind == SuperKind::Atom && !g.has_atom(mm.super_atom)) {
      throw Error(ErrorCode::UnknownSuper,
                  "SuperAtom " + std::to_string(mm.super_atom) +
                      " of ring " + std::to_string(step) + " is missing");
    }

    std::vector<std::pair<const detail::BondMove*, Bond>> lifted;
    for (const detail::BondMove& mv : traj.moves[step]) {
      const Bond* b = g.find_bond(mv.after.first, mv.after.second);
      if (!b) {
        throw Error(ErrorCode::DanglingBranch,
                    "relocated bond " + std::to_string(mv.after.first) + "-" +
                        std::to_string(mv.after.second) +
                        " not found while restoring ring " +
                        std::to_string(step));
      }
      lifted.emplace_back(&mv, *b);
      g.remove_bond(mv.after.first, mv.after.second);
    }
    for (auto& [mv, bond] : lifted) {
      const bool first_is_from = bond.from == mv->after.first;
      bond.from = first_is_from ? mv->before.first : mv->before.second;
      bond.to = first_is_from ? mv->before.second : mv->before.first;
      try {
        g.add_bond(bond);
      } catch (const Error& e) {
        throw Error(ErrorCode::DanglingBranch,
                    std::string("cannot reattach branch: ") + e.what());
      }
    }

    for (std::size_t i = 0; i < ring.bonds.size(); ++i) {
      const Bond& rb = ring.bonds[i];
      if (mm.kind == SuperKind::Bond && i + 1 == ring.bonds.size()) {
        Bond* kept = g.find_bond(rb.from, rb.to);
        if (!kept || !kept->is_super) {
          throw Error(ErrorCode::UnknownSuper,
                      "SuperBond of ring " + std::to_string(step) +
                          " is missing from the graph");
        }
        kept->is_super = rb.is_super;
        kept->order = rb.order;
        continue;
      }
      try {
        g.add_bond(rb);
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedGraph,
                    "ring " + std::to_string(step) + ": " + e.what());
      }
    }

    if (mm.kind == SuperKind::Atom) {
      if (g.degree(mm.super_atom) != 0) {
        throw Error(ErrorCode::DanglingBranch,
                    "SuperAtom " + std::to_string(mm.super_atom) + " keeps " +
                        std::to_string(g.degree(mm.super_atom)) +
                        " bonds not covered by branch links");
      }
      g.remove_atom(mm.super_atom);
    }
  }
  return g;
}

inline bool verify_roundtrip(const MolecularGraph& g,
                             const SplitOptions& options = {}) {
  return isomorphic(g, restore(split(g, options)));
}

}  // namespace rfl
