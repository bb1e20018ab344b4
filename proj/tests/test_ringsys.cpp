#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace rfl;
using namespace rfl::testing;

TEST(Rings, TreeHasNone) {
  EXPECT_TRUE(non_nested_rings(chain(7)).empty());
  EXPECT_TRUE(non_nested_rings(MolecularGraph{}).empty());
}

TEST(Rings, Benzene) {
  const auto rings = non_nested_rings(load("benzene.mgf"));
  ASSERT_EQ(rings.size(), 1u);
  EXPECT_EQ(rings[0].size(), 6u);
  EXPECT_EQ(ring_adjacency(rings).gamma, std::vector<int>{0});
}

TEST(Rings, NaphthaleneDropsThePerimeter) {
  const MolecularGraph g = load("naphthalene.mgf");
  EXPECT_EQ(all_cycles(g).size(), 3u);
  const auto rings = non_nested_rings(g);
  ASSERT_EQ(rings.size(), 2u);
  EXPECT_EQ(ring_adjacency(rings).gamma, (std::vector<int>{1, 1}));
}

TEST(Rings, CanonicalRotation) {
  const Ring r = make_canonical_ring({7, 3, 9, 1, 4});
  EXPECT_EQ(r.vertices, (std::vector<VertexId>{1, 4, 7, 3, 9}));
  ASSERT_EQ(r.bonds.size(), 5u);
  EXPECT_EQ(r.bonds.back(), (BondKey{9, 1}));
}

TEST(Rings, CubeKeepsOnlyFaces) {
  MolecularGraph g;
  for (int i = 0; i < 8; ++i) g.add_atom("C");
  for (auto [a, b] : std::vector<std::pair<int, int>>{
           {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
           {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}}) {
    g.add_bond(a, b, BondOrder::Single);
  }
  const auto rings = non_nested_rings(g);
  EXPECT_EQ(rings.size(), 6u);
  for (const Ring& r : rings) EXPECT_EQ(r.size(), 4u);
  for (int gamma : ring_adjacency(rings).gamma) EXPECT_EQ(gamma, 4);
}

TEST(Rings, SpiroRingsShareNoBond) {
  MolecularGraph g = cycle_graph(5);
  const VertexId hub = 0;
  VertexId prev = hub;
  for (int i = 0; i < 4; ++i) {
    const VertexId v = g.add_atom("C");
    g.add_bond(prev, v, BondOrder::Single);
    prev = v;
  }
  g.add_bond(prev, hub, BondOrder::Single);
  const auto rings = non_nested_rings(g);
  ASSERT_EQ(rings.size(), 2u);
  EXPECT_EQ(ring_adjacency(rings).gamma, (std::vector<int>{0, 0}));
}

TEST(Rings, Fig3Molecule) {
  const auto rings = non_nested_rings(load("fig3.mgf"));
  ASSERT_EQ(rings.size(), 3u);
  EXPECT_EQ(rings[0].vertices, (std::vector<VertexId>{1, 2, 3, 4, 5}));
  EXPECT_EQ(rings[1].vertices, (std::vector<VertexId>{9, 10, 11, 12, 13}));
  EXPECT_EQ(rings[2].vertices, (std::vector<VertexId>{10, 11, 14, 15, 16, 17}));
  EXPECT_EQ(ring_adjacency(rings).gamma, (std::vector<int>{0, 1, 1}));
}

TEST(Rings, BudgetExceeded) {
  MolecularGraph k7;
  for (int i = 0; i < 7; ++i) k7.add_atom("C");
  for (int a = 0; a < 7; ++a) {
    for (int b = a + 1; b < 7; ++b) k7.add_bond(a, b, BondOrder::Single);
  }
  try {
    non_nested_rings(k7, 50);
    FAIL() << "expected BudgetExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
  }
  EXPECT_EQ(non_nested_rings(k7).size(), 35u);  // every triangle
}

TEST(RingsProperty, MatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const MolecularGraph g = random_connected(rng, 9, 13);
    EXPECT_EQ(edge_sets(non_nested_rings(g)), brute_force_non_nested(g))
        << write_mgf(g);
  }
}

TEST(RingsProperty, EveryRingIsASimpleCycleOfTheGraph) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const MolecularGraph g = random_connected(rng, 10, 14);
    for (const Ring& r : non_nested_rings(g)) {
      std::set<VertexId> distinct(r.vertices.begin(), r.vertices.end());
      EXPECT_EQ(distinct.size(), r.size());
      for (const BondKey& b : r.bonds) EXPECT_TRUE(g.has_bond(b.from, b.to));
    }
  }
}

TEST(RingsProperty, RemovingRingBondsLeavesAForest) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    MolecularGraph g = random_connected(rng, 10, 14);
    for (const Ring& r : non_nested_rings(g)) {
      for (const BondKey& b : r.bonds) {
        if (g.has_bond(b.from, b.to)) g.remove_bond(b.from, b.to);
      }
    }
    EXPECT_TRUE(is_acyclic(g));
  }
}

TEST(RingsProperty, InvariantUnderRelabeling) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const MolecularGraph g = random_connected(rng, 10, 14);
    const MolecularGraph h = random_relabel(g, rng);
    const auto a = non_nested_rings(g);
    const auto b = non_nested_rings(h);
    ASSERT_EQ(a.size(), b.size());
    std::multiset<std::size_t> la;
    std::multiset<std::size_t> lb;
    for (const Ring& r : a) la.insert(r.size());
    for (const Ring& r : b) lb.insert(r.size());
    EXPECT_EQ(la, lb);
    auto ga = ring_adjacency(a).gamma;
    auto gb = ring_adjacency(b).gamma;
    std::sort(ga.begin(), ga.end());
    std::sort(gb.begin(), gb.end());
    EXPECT_EQ(ga, gb);
  }
}
