#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfl/error.hpp"
#include "rfl/metrics.hpp"
#include "rfl/molgraph.hpp"
#include "rfl/parallel.hpp"

namespace rfl {

struct ComplexityInterval {
  long lo = 0;
  long hi = 0;
  bool contains(long c) const { return c >= lo && c <= hi; }
  bool operator==(const ComplexityInterval&) const = default;
};

struct CorpusSpec {
  std::size_t count = 10;  // per level
  std::vector<ComplexityInterval> levels{
      {9, 40}, {41, 80}, {81, 130}, {131, 200}, {201, 300}};
  std::uint64_t seed = 0;
  int max_rings_fused = 4;
  int max_atoms = 60;
  int max_attempts = 200;  // per sample before GenerationStall

  void validate() const {
    if (levels.empty()) {
      throw Error(ErrorCode::ParseError, "corpus needs at least one level");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i].lo > levels[i].hi) {
        throw Error(ErrorCode::ParseError, "empty complexity interval");
      }
      if (i > 0 && levels[i].lo <= levels[i - 1].hi) {
        throw Error(ErrorCode::ParseError,
                    "complexity intervals must be ascending and disjoint");
      }
    }
    if (max_rings_fused < 1 || max_atoms < 1) {
      throw Error(ErrorCode::ParseError,
                  "max-rings-fused and max-atoms must be positive");
    }
  }
};

/// Parses "9-40,41-80,...".
inline std::vector<ComplexityInterval> parse_levels(std::string_view text) {
  std::vector<ComplexityInterval> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string_view item = text.substr(pos, comma - pos);
    const std::size_t dash = item.find('-');
    ComplexityInterval iv;
    if (dash == std::string_view::npos ||
        !detail::parse_number(item.substr(0, dash), iv.lo) ||
        !detail::parse_number(item.substr(dash + 1), iv.hi)) {
      throw Error(ErrorCode::ParseError,
                  "bad level interval '" + std::string(item) +
                      "' (expected lo-hi)");
    }
    out.push_back(iv);
    pos = comma + 1;
  }
  return out;
}

struct GeneratedMolecule {
  std::string id;
  std::size_t level = 1;  // 1-based position in CorpusSpec::levels
  long complexity = 0;
  MolecularGraph graph;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Grows one molecule toward a target complexity from a single atom.
/// Every move has a known complexity increment:
///   chain atom                  +2
///   k-ring hung on a bond       +2k+13
///   k-ring fused on a ring bond +2k+9
///   spiro k-ring on an atom     +2k+11
class MoleculeBuilder {
 public:
  MoleculeBuilder(std::mt19937_64& rng, int max_atoms, int max_rings_fused)
      : rng_(rng), max_atoms_(max_atoms), max_fused_(max_rings_fused) {
    g_.add_atom("C");
    complexity_ = 1;
  }

  long complexity() const { return complexity_; }

  MolecularGraph build(long target) {
    while (complexity_ < target) {
      if (!step(target - complexity_)) break;
    }
    decorate();
    return g_;
  }

 private:
  enum class Move { Chain, Hang, Fuse, Spiro };

  struct Candidate {
    Move move;
    int ring_size;
    long gain;
    int atoms;
    double weight;
  };

  int atoms_left() const {
    return max_atoms_ - static_cast<int>(g_.atom_count());
  }

  bool step(long remaining) {
    static constexpr int kSizes[] = {3, 4, 5, 6, 7, 8};
    static constexpr double kSizeWeight[] = {0.15, 0.2, 1.0, 1.6, 0.15, 0.05};
    std::vector<Candidate> cands;
    auto consider = [&](Move m, int k, long gain, int atoms, double w) {
      if (gain > remaining || atoms > atoms_left()) return;
      // never strand a remainder of 1, which no move can fill
      if (remaining - gain == 1) return;
      cands.push_back({m, k, gain, atoms, w});
    };
    consider(Move::Chain, 0, 2, 1, 3.0);
    const bool can_fuse = !fusable_bonds().empty();
    for (std::size_t s = 0; s < std::size(kSizes); ++s) {
      const int k = kSizes[s];
      consider(Move::Hang, k, 2 * k + 13, k, 0.8 * kSizeWeight[s]);
      if (can_fuse) consider(Move::Fuse, k, 2 * k + 9, k - 2, 1.2 * kSizeWeight[s]);
      consider(Move::Spiro, k, 2 * k + 11, k - 1, 0.15 * kSizeWeight[s]);
    }
    if (cands.empty()) return false;

    // Complexity still needed per free atom slot; once chains alone cannot
    // reach the target, keep only moves dense enough to get there.
    const double need =
        static_cast<double>(remaining) / std::max(1, atoms_left());
    std::vector<Candidate> dense;
    for (const Candidate& c : cands) {
      if (static_cast<double>(c.gain) / c.atoms >= need) dense.push_back(c);
    }
    if (need > 2.0) {
      if (dense.empty()) {
        auto best = std::max_element(
            cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
              return static_cast<double>(a.gain) / a.atoms <
                     static_cast<double>(b.gain) / b.atoms;
            });
        dense.push_back(*best);
      }
      cands = std::move(dense);
    }
    std::vector<double> w;
    for (const Candidate& c : cands) w.push_back(c.weight);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    // a chosen move can be blocked by valence; try a few times
    for (int attempt = 0; attempt < 8; ++attempt) {
      const Candidate& c = cands[pick(rng_)];
      if (apply(c)) {
        complexity_ += c.gain;
        return true;
      }
    }
    return false;
  }

  std::vector<VertexId> atoms_with_degree_below(std::size_t limit) const {
    std::vector<VertexId> out;
    for (VertexId v : g_.vertex_ids()) {
      if (g_.degree(v) < limit) out.push_back(v);
    }
    return out;
  }

  template <class T>
  const T& choose(const std::vector<T>& items) {
    std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
    return items[d(rng_)];
  }

  std::vector<VertexId> new_cycle_path(int count) {
    std::vector<VertexId> out;
    for (int i = 0; i < count; ++i) out.push_back(g_.add_atom("C"));
    for (int i = 0; i + 1 < count; ++i) {
      g_.add_bond(out[i], out[i + 1], BondOrder::Single);
    }
    return out;
  }

  int new_system() {
    system_size_.push_back(1);
    return static_cast<int>(system_size_.size()) - 1;
  }

  void add_ring_bonds(const std::vector<VertexId>& cycle, int system) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const auto e = std::minmax(cycle[i], cycle[(i + 1) % cycle.size()]);
      ring_count_[{e.first, e.second}] += 1;
      edge_system_[{e.first, e.second}] = system;
      ring_degree_[cycle[i]] += 2;
    }
  }

  std::vector<std::pair<VertexId, VertexId>> fusable_bonds() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    for (const auto& [e, n] : ring_count_) {
      if (n != 1) continue;
      if (system_size_[edge_system_.at(e)] >= max_fused_) continue;
      const auto rd = [&](VertexId v) {
        auto it = ring_degree_.find(v);
        return it == ring_degree_.end() ? 0 : it->second;
      };
      if (rd(e.first) != 2 || rd(e.second) != 2) continue;
      if (g_.degree(e.first) >= 4 || g_.degree(e.second) >= 4) continue;
      out.push_back(e);
    }
    return out;
  }

  bool apply(const Candidate& c) {
    switch (c.move) {
      case Move::Chain: {
        auto free = atoms_with_degree_below(4);
        if (free.empty()) return false;
        const VertexId v = choose(free);
        const VertexId w = g_.add_atom("C");
        g_.add_bond(v, w, BondOrder::Single);
        return true;
      }
      case Move::Hang: {
        auto free = atoms_with_degree_below(4);
        if (free.empty()) return false;
        const VertexId v = choose(free);
        auto cycle = new_cycle_path(c.ring_size);
        g_.add_bond(cycle.back(), cycle.front(), BondOrder::Single);
        g_.add_bond(v, cycle.front(), BondOrder::Single);
        add_ring_bonds(cycle, new_system());
        return true;
      }
      case Move::Fuse: {
        auto bonds = fusable_bonds();
        if (bonds.empty()) return false;
        const auto [a, b] = choose(bonds);
        auto path = new_cycle_path(c.ring_size - 2);
        g_.add_bond(a, path.front(), BondOrder::Single);
        g_.add_bond(path.back(), b, BondOrder::Single);
        std::vector<VertexId> cycle{a};
        cycle.insert(cycle.end(), path.begin(), path.end());
        cycle.push_back(b);
        const int system = edge_system_.at({a, b});
        ++system_size_[system];
        add_ring_bonds(cycle, system);
        return true;
      }
      case Move::Spiro: {
        auto free = atoms_with_degree_below(3);
        if (free.empty()) return false;
        const VertexId v = choose(free);
        auto path = new_cycle_path(c.ring_size - 1);
        g_.add_bond(v, path.front(), BondOrder::Single);
        g_.add_bond(path.back(), v, BondOrder::Single);
        std::vector<VertexId> cycle{v};
        cycle.insert(cycle.end(), path.begin(), path.end());
        add_ring_bonds(cycle, new_system());
        return true;
      }
    }
    return false;
  }

  static int valence(const std::string& label) {
    if (label == "C") return 4;
    if (label == "N") return 3;
    if (label == "O" || label == "S") return 2;
    return 1;
  }

  /// Picks heteroatom labels by degree and raises some bond orders where
  /// valence allows.
  void decorate() {
    static const std::vector<std::pair<std::string, double>> kTerminal{
        {"C", 5}, {"O", 1.2}, {"N", 0.8}, {"Cl", 0.5}, {"F", 0.4},
        {"Br", 0.3}, {"CH3", 0.8}, {"OH", 0.8}, {"NH2", 0.5}};
    static const std::vector<std::pair<std::string, double>> kDivalent{
        {"C", 8}, {"N", 1.2}, {"O", 1.0}, {"S", 0.4}};
    static const std::vector<std::pair<std::string, double>> kTrivalent{
        {"C", 6}, {"N", 1.0}};
    auto pick = [&](const std::vector<std::pair<std::string, double>>& t) {
      std::vector<double> w;
      for (const auto& [l, x] : t) w.push_back(x);
      std::discrete_distribution<std::size_t> d(w.begin(), w.end());
      return t[d(rng_)].first;
    };
    MolecularGraph out;
    for (Atom a : g_.atoms()) {
      const std::size_t deg = g_.degree(a.id);
      if (g_.atom_count() == 1 || deg >= 4) {
        a.label = "C";
      } else if (deg <= 1) {
        a.label = pick(kTerminal);
      } else if (deg == 2) {
        a.label = pick(kDivalent);
      } else {
        a.label = pick(kTrivalent);
      }
      out.insert_atom(a);
    }
    std::map<VertexId, int> used;
    for (const Bond& b : g_.bonds()) {
      ++used[b.from];
      ++used[b.to];
    }
    std::bernoulli_distribution raise(0.18);
    std::bernoulli_distribution triple(0.15);
    for (Bond b : g_.bonds()) {
      const int spare_from = valence(out.atom(b.from).label) - used[b.from];
      const int spare_to = valence(out.atom(b.to).label) - used[b.to];
      const bool in_ring = ring_count_.count(b.key().unordered()) != 0;
      if (spare_from >= 1 && spare_to >= 1 && raise(rng_)) {
        const bool make_triple =
            !in_ring && spare_from >= 2 && spare_to >= 2 && triple(rng_);
        b.order = make_triple ? BondOrder::Triple : BondOrder::Double;
        const int extra = make_triple ? 2 : 1;
        used[b.from] += extra;
        used[b.to] += extra;
      }
      out.add_bond(b);
    }
    g_ = std::move(out);
  }

  std::mt19937_64& rng_;
  int max_atoms_;
  int max_fused_;
  MolecularGraph g_;
  long complexity_ = 0;
  std::map<std::pair<VertexId, VertexId>, int> ring_count_;
  std::map<std::pair<VertexId, VertexId>, int> edge_system_;
  std::map<VertexId, int> ring_degree_;
  std::vector<int> system_size_;
};

}  // namespace detail

inline std::string corpus_sample_id(std::size_t level, std::size_t index,
                                    std::size_t count) {
  const std::size_t width =
      std::max<std::size_t>(4, std::to_string(count > 0 ? count - 1 : 0).size());
  std::string idx = std::to_string(index);
  idx.insert(0, width - std::min(width, idx.size()), '0');
  return "mol_" + std::to_string(level) + "_" + idx;
}

/// One molecule for (level, index). Seeded from (spec.seed, level, index)
/// only, so samples can be produced in any order or in parallel.
inline GeneratedMolecule generate_molecule(const CorpusSpec& spec,
                                           std::size_t level,
                                           std::size_t index) {
  const ComplexityInterval& iv = spec.levels.at(level - 1);
  std::uint64_t s = detail::splitmix64(spec.seed);
  s = detail::splitmix64(s ^ level);
  s = detail::splitmix64(s ^ index);
  std::mt19937_64 rng(s);
  const long lo = std::max(1L, iv.lo);
  if (iv.hi < lo) {
    throw Error(ErrorCode::GenerationStall,
                "interval [" + std::to_string(iv.lo) + "," +
                    std::to_string(iv.hi) + "] holds no molecule");
  }
  std::uniform_int_distribution<long> target(lo, iv.hi);
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    detail::MoleculeBuilder builder(rng, spec.max_atoms, spec.max_rings_fused);
    MolecularGraph g = builder.build(target(rng));
    const long c = complexity(g).complexity;
    if (iv.contains(c)) {
      return {corpus_sample_id(level, index, spec.count), level, c,
              std::move(g)};
    }
  }
  throw Error(ErrorCode::GenerationStall,
              "no molecule in [" + std::to_string(iv.lo) + "," +
                  std::to_string(iv.hi) + "] after " +
                  std::to_string(spec.max_attempts) + " attempts");
}

/// All samples, ordered by level then index.
inline std::vector<GeneratedMolecule> generate_corpus(const CorpusSpec& spec,
                                                      unsigned jobs = 1) {
  spec.validate();
  const std::size_t total = spec.count * spec.levels.size();
  std::vector<GeneratedMolecule> out(total);
  parallel_for(total, jobs, [&](std::size_t i) {
    out[i] = generate_molecule(spec, i / spec.count + 1, i % spec.count);
  });
  return out;
}

/// Manifest text: a comment line with quintile edges of the generated
/// complexities, then `id<TAB>complexity<TAB>level` rows.
inline std::string corpus_manifest(const std::vector<GeneratedMolecule>& mols) {
  std::vector<long> values;
  for (const auto& m : mols) values.push_back(m.complexity);
  std::string out = "# quintile_edges";
  const auto edges = quintile_edges(values);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out += (i == 0 ? "\t" : ",") + std::to_string(edges[i]);
  }
  out += "\nid\tcomplexity\tlevel\n";
  for (const auto& m : mols) {
    out += m.id + "\t" + std::to_string(m.complexity) + "\t" +
           std::to_string(m.level) + "\n";
  }
  return out;
}

}  // namespace rfl
