#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "rfl/molgraph.hpp"

namespace rfl {

namespace detail {

inline std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over the running combination
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

/// Dense adjacency view used by the matcher: vertices renumbered 0..n-1 in
/// id order, neighbor lists carry bond orders.
struct DenseGraph {
  std::vector<VertexId> ids;
  std::vector<std::string> labels;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, order)
  std::vector<std::map<int, int>> order_of;           // neighbor -> order

  explicit DenseGraph(const MolecularGraph& g) {
    ids = g.vertex_ids();
    std::unordered_map<VertexId, int> index;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      index[ids[i]] = static_cast<int>(i);
      labels.push_back(g.atom(ids[i]).label);
    }
    adj.resize(ids.size());
    order_of.resize(ids.size());
    for (const Bond& b : g.bonds()) {
      const int a = index.at(b.from);
      const int c = index.at(b.to);
      adj[a].emplace_back(c, to_int(b.order));
      adj[c].emplace_back(a, to_int(b.order));
      order_of[a][c] = to_int(b.order);
      order_of[c][a] = to_int(b.order);
    }
  }
  int size() const { return static_cast<int>(ids.size()); }
};

/// Iterated neighborhood hashing; identical vertices (under any isomorphism)
/// always get identical values.
inline std::vector<std::uint64_t> neighborhood_hashes(const DenseGraph& g,
                                                      int rounds) {
  std::vector<std::uint64_t> h(g.size());
  for (int v = 0; v < g.size(); ++v) {
    h[v] = mix_hash(std::hash<std::string>{}(g.labels[v]), g.adj[v].size());
  }
  std::vector<std::uint64_t> next(g.size());
  std::vector<std::uint64_t> around;
  for (int r = 0; r < rounds; ++r) {
    for (int v = 0; v < g.size(); ++v) {
      around.clear();
      for (auto [w, order] : g.adj[v]) around.push_back(mix_hash(h[w], order));
      std::sort(around.begin(), around.end());
      std::uint64_t acc = h[v];
      for (std::uint64_t x : around) acc = mix_hash(acc, x);
      next[v] = acc;
    }
    h.swap(next);
  }
  return h;
}

class Matcher {
 public:
  Matcher(const DenseGraph& a, const DenseGraph& b,
          std::vector<std::uint64_t> ha, std::vector<std::uint64_t> hb)
      : a_(a), b_(b), ha_(std::move(ha)), hb_(std::move(hb)),
        map_ab_(a.size(), -1), map_ba_(b.size(), -1) {
    build_order();
  }

  bool run() { return extend(0); }

 private:
  void build_order() {
    std::map<std::uint64_t, int> freq;
    for (std::uint64_t h : ha_) ++freq[h];
    std::vector<bool> placed(a_.size(), false);
    parent_.assign(a_.size(), -1);
    while (static_cast<int>(order_.size()) < a_.size()) {
      int root = -1;
      for (int v = 0; v < a_.size(); ++v) {
        if (placed[v]) continue;
        if (root < 0 || freq[ha_[v]] < freq[ha_[root]]) root = v;
      }
      placed[root] = true;
      std::size_t head = order_.size();
      order_.push_back(root);
      while (head < order_.size()) {
        int v = order_[head++];
        for (auto [w, ord] : a_.adj[v]) {
          if (placed[w]) continue;
          placed[w] = true;
          parent_[w] = v;
          order_.push_back(w);
        }
      }
    }
  }

  bool feasible(int v, int c) const {
    if (map_ba_[c] >= 0 || hb_[c] != ha_[v] || a_.labels[v] != b_.labels[c] ||
        a_.adj[v].size() != b_.adj[c].size()) {
      return false;
    }
    int mapped_nbrs_a = 0;
    for (auto [w, ord] : a_.adj[v]) {
      if (map_ab_[w] < 0) continue;
      ++mapped_nbrs_a;
      auto it = b_.order_of[c].find(map_ab_[w]);
      if (it == b_.order_of[c].end() || it->second != ord) return false;
    }
    int mapped_nbrs_b = 0;
    for (auto [w, ord] : b_.adj[c]) {
      if (map_ba_[w] >= 0) ++mapped_nbrs_b;
    }
    return mapped_nbrs_a == mapped_nbrs_b;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    const int v = order_[depth];
    auto attempt = [&](int c) {
      if (!feasible(v, c)) return false;
      map_ab_[v] = c;
      map_ba_[c] = v;
      if (extend(depth + 1)) return true;
      map_ab_[v] = -1;
      map_ba_[c] = -1;
      return false;
    };
    if (parent_[v] >= 0) {
      for (auto [c, ord] : b_.adj[map_ab_[parent_[v]]]) {
        if (attempt(c)) return true;
      }
      return false;
    }
    for (int c = 0; c < b_.size(); ++c) {
      if (attempt(c)) return true;
    }
    return false;
  }

  const DenseGraph& a_;
  const DenseGraph& b_;
  std::vector<std::uint64_t> ha_;
  std::vector<std::uint64_t> hb_;
  std::vector<int> map_ab_;
  std::vector<int> map_ba_;
  std::vector<int> order_;
  std::vector<int> parent_;
};

}  // namespace detail

/// True iff a bijection of vertices preserves labels, bond presence and bond
/// order. Direction, coordinates and super flags are ignored.
inline bool isomorphic(const MolecularGraph& g1, const MolecularGraph& g2) {
  if (g1.atom_count() != g2.atom_count() ||
      g1.bond_count() != g2.bond_count()) {
    return false;
  }
  detail::DenseGraph a(g1);
  detail::DenseGraph b(g2);
  auto sorted_labels = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted_labels(a.labels) != sorted_labels(b.labels)) return false;

  // Hash rounds: enough for information to cross the graph diameter on
  // typical molecules, capped to keep large inputs cheap.
  const int rounds = std::min(a.size(), 8);
  auto ha = detail::neighborhood_hashes(a, rounds);
  auto hb = detail::neighborhood_hashes(b, rounds);
  auto sa = ha;
  auto sb = hb;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) return false;
  return detail::Matcher(a, b, std::move(ha), std::move(hb)).run();
}

}  // namespace rfl
