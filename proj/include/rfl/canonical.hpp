#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "rfl/molgraph.hpp"

namespace rfl {

namespace detail {

/// Individualization-refinement search for the lexicographically smallest
/// adjacency encoding. Automorphisms found between equal leaves prune sibling
/// branches lying in the same orbit.
class Canonizer {
 public:
  explicit Canonizer(const MolecularGraph& g) {
    const auto ids = g.vertex_ids();
    n_ = static_cast<int>(ids.size());
    std::unordered_map<VertexId, int> index;
    for (int i = 0; i < n_; ++i) index[ids[i]] = i;
    labels_.resize(n_);
    adj_.resize(n_);
    for (int i = 0; i < n_; ++i) labels_[i] = g.atom(ids[i]).label;
    for (const Bond& b : g.bonds()) {
      const int a = index.at(b.from);
      const int c = index.at(b.to);
      adj_[a].emplace_back(c, to_int(b.order));
      adj_[c].emplace_back(a, to_int(b.order));
    }
  }

  std::string run() {
    std::vector<std::string> distinct = labels_;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    std::vector<int> colors(n_);
    for (int v = 0; v < n_; ++v) {
      colors[v] = static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), labels_[v]) -
          distinct.begin());
    }
    refine(colors);
    std::vector<int> prefix;
    search(colors, prefix);
    return render();
  }

 private:
  using Encoding = std::vector<std::tuple<int, int, int>>;

  void refine(std::vector<int>& colors) const {
    int classes = count_classes(colors);
    std::vector<std::pair<int, std::vector<std::pair<int, int>>>> sig(n_);
    while (true) {
      for (int v = 0; v < n_; ++v) {
        sig[v].first = colors[v];
        auto& around = sig[v].second;
        around.clear();
        for (auto [w, ord] : adj_[v]) around.emplace_back(colors[w], ord);
        std::sort(around.begin(), around.end());
      }
      std::vector<int> order(n_);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return sig[a] < sig[b]; });
      std::vector<int> next(n_);
      int rank = 0;
      for (int i = 0; i < n_; ++i) {
        if (i > 0 && sig[order[i]] != sig[order[i - 1]]) ++rank;
        next[order[i]] = rank;
      }
      colors.swap(next);
      const int now = n_ == 0 ? 0 : rank + 1;
      if (now == classes) return;
      classes = now;
    }
  }

  static int count_classes(const std::vector<int>& colors) {
    std::vector<int> c = colors;
    std::sort(c.begin(), c.end());
    return static_cast<int>(std::unique(c.begin(), c.end()) - c.begin());
  }

  Encoding encode(const std::vector<int>& pos) const {
    Encoding e;
    for (int v = 0; v < n_; ++v) {
      for (auto [w, ord] : adj_[v]) {
        if (v < w) e.emplace_back(std::min(pos[v], pos[w]),
                                  std::max(pos[v], pos[w]), ord);
      }
    }
    std::sort(e.begin(), e.end());
    return e;
  }

  void orbit_roots(const std::vector<int>& prefix, std::vector<int>& root) const {
    root.resize(n_);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int x) {
      while (root[x] != x) x = root[x] = root[root[x]];
      return x;
    };
    for (const auto& gen : automorphisms_) {
      bool fixes = std::all_of(prefix.begin(), prefix.end(),
                               [&](int v) { return gen[v] == v; });
      if (!fixes) continue;
      for (int v = 0; v < n_; ++v) {
        int a = find(v);
        int b = find(gen[v]);
        if (a != b) root[std::max(a, b)] = std::min(a, b);
      }
    }
    for (int v = 0; v < n_; ++v) root[v] = find(v);
  }

  void search(const std::vector<int>& colors, std::vector<int>& prefix) {
    // colors are ranks; discrete when every rank is unique
    std::vector<int> cell_size(n_ + 1, 0);
    for (int c : colors) ++cell_size[c];
    int target = -1;
    for (int c = 0; c < n_; ++c) {
      if (cell_size[c] > 1) {
        target = c;
        break;
      }
    }
    if (target < 0) {
      leaf(colors);
      return;
    }
    std::vector<int> tried;
    for (int v = 0; v < n_; ++v) {
      if (colors[v] != target) continue;
      if (!tried.empty()) {
        std::vector<int> root;
        orbit_roots(prefix, root);
        bool same = std::any_of(tried.begin(), tried.end(),
                                [&](int t) { return root[t] == root[v]; });
        if (same) continue;
      }
      tried.push_back(v);
      std::vector<int> next(n_);
      for (int w = 0; w < n_; ++w) {
        next[w] = 2 * colors[w] + ((colors[w] == target && w != v) ? 1 : 0);
      }
      refine(next);
      prefix.push_back(v);
      search(next, prefix);
      prefix.pop_back();
    }
  }

  void leaf(const std::vector<int>& pos) {
    Encoding e = encode(pos);
    if (!have_best_ || e < best_) {
      best_ = std::move(e);
      best_pos_ = pos;
      have_best_ = true;
      return;
    }
    if (e == best_) {
      // vertex at position p here maps to the vertex at position p in best
      std::vector<int> at_best(n_);
      for (int v = 0; v < n_; ++v) at_best[best_pos_[v]] = v;
      std::vector<int> gen(n_);
      for (int v = 0; v < n_; ++v) gen[v] = at_best[pos[v]];
      automorphisms_.push_back(std::move(gen));
    }
  }

  std::string render() const {
    std::vector<int> at(n_);
    for (int v = 0; v < n_; ++v) at[best_pos_.empty() ? v : best_pos_[v]] = v;
    std::string out = std::to_string(n_) + "|";
    for (int p = 0; p < n_; ++p) {
      const std::string& l = labels_[at[p]];
      out += std::to_string(l.size()) + ":" + l;
    }
    out += "|";
    for (const auto& [a, b, o] : best_) {
      out += std::to_string(a) + "-" + std::to_string(b) + ":" +
             std::to_string(o) + ",";
    }
    return out;
  }

  int n_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  Encoding best_;
  std::vector<int> best_pos_;
  bool have_best_ = false;
  std::vector<std::vector<int>> automorphisms_;
};

}  // namespace detail

/// Deterministic string that is equal for two graphs iff they are isomorphic
/// (labels and bond orders respected; ids, direction and coordinates ignored).
inline std::string canonical_form(const MolecularGraph& g) {
  return detail::Canonizer(g).run();
}

}  // namespace rfl
