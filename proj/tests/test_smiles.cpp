#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace rfl;
using namespace rfl::testing;

namespace {

ErrorCode code_of(const std::string& s) {
  try {
    import_smiles_subset(s);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted " << s;
  return ErrorCode::ParseError;
}

}  // namespace

TEST(Smiles, Shapes) {
  const MolecularGraph isobutane = import_smiles_subset("CC(C)C");
  EXPECT_EQ(isobutane.atom_count(), 4u);
  EXPECT_EQ(isobutane.bond_count(), 3u);
  EXPECT_EQ(isobutane.degree(1), 3u);

  const MolecularGraph hexane = import_smiles_subset("C1CCCCC1");
  EXPECT_EQ(hexane.atom_count(), 6u);
  EXPECT_EQ(hexane.bond_count(), 6u);
  EXPECT_EQ(non_nested_rings(hexane).size(), 1u);
}

TEST(Smiles, KekuleBenzeneMatchesFixture) {
  EXPECT_TRUE(isomorphic(import_smiles_subset("C1=CC=CC=C1"), load("benzene.mgf")));
  EXPECT_TRUE(isomorphic(import_smiles_subset("C12=C(C=CC=C1)C=CC=C2"), load("naphthalene.mgf")));
  EXPECT_TRUE(isomorphic(import_smiles_subset("CCCCC"), load("chain.mgf")));
}

TEST(Smiles, BondsLabelsAndComponents) {
  const MolecularGraph g = import_smiles_subset("ClC=CC#N.Br");
  EXPECT_EQ(g.atom(0).label, "Cl");
  EXPECT_EQ(g.find_bond(1, 2)->order, BondOrder::Double);
  EXPECT_EQ(g.find_bond(3, 4)->order, BondOrder::Triple);
  EXPECT_EQ(component_count(g), 2u);
}

TEST(Smiles, RingClosureBondOrder) {
  const MolecularGraph g = import_smiles_subset("C=1CCC1");
  EXPECT_EQ(g.find_bond(0, 3)->order, BondOrder::Double);
}

TEST(Smiles, Unsupported) {
  EXPECT_EQ(code_of("c1ccccc1"), ErrorCode::UnsupportedFeature);
  EXPECT_EQ(code_of("[NH4+]"), ErrorCode::UnsupportedFeature);
  EXPECT_EQ(code_of("C%10CC%10"), ErrorCode::UnsupportedFeature);
  EXPECT_EQ(code_of("F/C=C/F"), ErrorCode::UnsupportedFeature);
}

TEST(Smiles, Malformed) {
  EXPECT_EQ(code_of(""), ErrorCode::ParseError);
  EXPECT_EQ(code_of("C1CC"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("C(C"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("C)"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("C=-C"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("C11"), ErrorCode::ParseError);
  EXPECT_EQ(code_of("CX"), ErrorCode::ParseError);
}
