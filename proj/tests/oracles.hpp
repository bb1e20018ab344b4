#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rfl/rfl.hpp"

namespace rfl::testing {

inline std::string data_path(const std::string& name) {
  return std::string(RFL_TEST_DATA) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MolecularGraph load(const std::string& name) {
  return read_mgf(read_text(data_path(name)));
}

inline MolecularGraph chain(int n, const std::string& label = "C") {
  MolecularGraph g;
  for (int i = 0; i < n; ++i) g.add_atom(label);
  for (int i = 1; i < n; ++i) g.add_bond(i - 1, i, BondOrder::Single);
  return g;
}

inline MolecularGraph cycle_graph(int n) {
  MolecularGraph g = chain(n);
  g.add_bond(n - 1, 0, BondOrder::Single);
  return g;
}

/// Random connected simple graph: a random spanning tree plus extra edges.
inline MolecularGraph random_connected(std::mt19937_64& rng, int max_vertices,
                                       int max_edges) {
  std::uniform_int_distribution<int> nv(1, max_vertices);
  const int n = nv(rng);
  MolecularGraph g;
  const char* labels[] = {"C", "N", "O", "S"};
  for (int i = 0; i < n; ++i) g.add_atom(labels[rng() % 4]);
  for (int i = 1; i < n; ++i) {
    g.add_bond(static_cast<VertexId>(rng() % i), i, BondOrder::Single);
  }
  const int room = std::min<int>(max_edges, n * (n - 1) / 2) - (n - 1);
  const int extra = room > 0 ? static_cast<int>(rng() % (room + 1)) : 0;
  for (int tries = 0, added = 0; added < extra && tries < 200; ++tries) {
    const VertexId a = static_cast<VertexId>(rng() % n);
    const VertexId b = static_cast<VertexId>(rng() % n);
    if (a == b || g.has_bond(a, b)) continue;
    g.add_bond(a, b, BondOrder::Single);
    ++added;
  }
  return g;
}

/// Copy of g under a uniformly random bijection onto shuffled, gapped ids.
inline MolecularGraph random_relabel(const MolecularGraph& g, std::mt19937_64& rng) {
  std::vector<VertexId> ids = g.vertex_ids();
  std::vector<VertexId> targets;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    targets.push_back(static_cast<VertexId>(3 * i + 1));
  }
  std::shuffle(targets.begin(), targets.end(), rng);
  std::map<VertexId, VertexId> mapping;
  for (std::size_t i = 0; i < ids.size(); ++i) mapping[ids[i]] = targets[i];
  return relabel(g, mapping);
}

using EdgeSet = std::vector<std::pair<VertexId, VertexId>>;

/// Every simple cycle as its sorted edge set. Each element of the cycle
/// space (XOR of fundamental cycles) is tested for "connected and 2-regular".
inline std::vector<EdgeSet> brute_force_cycles(const MolecularGraph& g) {
  const std::vector<Bond> bonds = g.bonds();
  const std::size_t m = bonds.size();
  std::map<VertexId, VertexId> parent;
  std::map<VertexId, std::vector<std::pair<VertexId, std::size_t>>> adj;
  for (std::size_t i = 0; i < m; ++i) {
    adj[bonds[i].from].push_back({bonds[i].to, i});
    adj[bonds[i].to].push_back({bonds[i].from, i});
  }
  std::map<VertexId, std::size_t> up;  // tree edge to parent
  std::map<VertexId, int> depth;
  std::vector<bool> tree(m, false);
  for (VertexId root : g.vertex_ids()) {
    if (depth.count(root)) continue;
    depth[root] = 0;
    std::vector<VertexId> queue{root};
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const VertexId v = queue[h];
      for (auto [w, i] : adj[v]) {
        if (depth.count(w)) continue;
        depth[w] = depth[v] + 1;
        parent[w] = v;
        up[w] = i;
        tree[i] = true;
        queue.push_back(w);
      }
    }
  }
  std::vector<std::vector<bool>> basis;
  for (std::size_t i = 0; i < m; ++i) {
    if (tree[i]) continue;
    std::vector<bool> c(m, false);
    c[i] = true;
    VertexId a = bonds[i].from;
    VertexId b = bonds[i].to;
    while (a != b) {
      if (depth[a] < depth[b]) std::swap(a, b);
      c[up[a]] = !c[up[a]];
      a = parent[a];
    }
    basis.push_back(std::move(c));
  }
  std::vector<EdgeSet> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << basis.size()); ++mask) {
    std::vector<bool> sum(m, false);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (!(mask >> j & 1)) continue;
      for (std::size_t i = 0; i < m; ++i) sum[i] = sum[i] != basis[j][i];
    }
    std::map<VertexId, std::vector<VertexId>> sub;
    EdgeSet edges;
    for (std::size_t i = 0; i < m; ++i) {
      if (!sum[i]) continue;
      sub[bonds[i].from].push_back(bonds[i].to);
      sub[bonds[i].to].push_back(bonds[i].from);
      edges.push_back(bonds[i].key().unordered());
    }
    const bool two_regular = std::all_of(sub.begin(), sub.end(),
                                         [](const auto& kv) { return kv.second.size() == 2; });
    if (!two_regular) continue;
    std::set<VertexId> seen{sub.begin()->first};
    std::vector<VertexId> stack{sub.begin()->first};
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      for (VertexId w : sub[v]) {
        if (seen.insert(w).second) stack.push_back(w);
      }
    }
    if (seen.size() != sub.size()) continue;
    std::sort(edges.begin(), edges.end());
    out.push_back(std::move(edges));
  }
  return out;
}

/// Cycles not contained in the union of the edges of strictly shorter cycles.
inline std::set<EdgeSet> brute_force_non_nested(const MolecularGraph& g) {
  const auto cycles = brute_force_cycles(g);
  std::set<EdgeSet> out;
  for (const EdgeSet& c : cycles) {
    std::set<std::pair<VertexId, VertexId>> shorter;
    for (const EdgeSet& d : cycles) {
      if (d.size() < c.size()) shorter.insert(d.begin(), d.end());
    }
    const bool nested = std::all_of(c.begin(), c.end(),
                                    [&](const auto& e) { return shorter.count(e) != 0; });
    if (!nested) out.insert(c);
  }
  return out;
}

inline std::set<EdgeSet> edge_sets(const std::vector<Ring>& rings) {
  std::set<EdgeSet> out;
  for (const Ring& r : rings) out.insert(r.edges());
  return out;
}

/// n_atom + n_bond + 12 * (number of non-nested rings), each term counted
/// independently of the library.
inline long counted_complexity(const MolecularGraph& g) {
  return static_cast<long>(g.atoms().size() + g.bonds().size() +
                           12 * brute_force_non_nested(g).size());
}

}  // namespace rfl::testing
