#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace rfl;
using namespace rfl::testing;

TEST(Complexity, KnownMolecules) {
  for (const char* name : {"benzene.mgf", "naphthalene.mgf", "chain.mgf", "fig3.mgf"}) {
    const MolecularGraph g = load(name);
    const ComplexityReport r = complexity(g);
    EXPECT_EQ(r.complexity, counted_complexity(g)) << name;
    EXPECT_EQ(r.complexity, static_cast<long>(r.n_atom + r.n_bond + 12 * r.n_ring));
  }
  EXPECT_EQ(complexity(load("benzene.mgf")).complexity, 24);
  EXPECT_EQ(complexity(load("naphthalene.mgf")).complexity, 45);
  EXPECT_EQ(complexity(load("chain.mgf")).complexity, 9);
}

TEST(Complexity, ConstructiveIncrements) {
  CorpusSpec spec;
  spec.count = 15;
  spec.seed = 4;
  std::mt19937_64 rng(4);
  for (const auto& m : generate_corpus(spec)) {
    MolecularGraph g = m.graph;
    const long base = complexity(g).complexity;
    const auto ids = g.vertex_ids();
    const VertexId v = ids[rng() % ids.size()];
    const VertexId a = g.add_atom("C");
    g.add_bond(v, a, BondOrder::Single);
    EXPECT_EQ(complexity(g).complexity, base + 2) << m.id;
    const VertexId b = g.add_atom("C");
    g.add_bond(a, b, BondOrder::Single);
    g.add_bond(b, v, BondOrder::Single);
    EXPECT_EQ(complexity(g).complexity, base + 2 + 2 + 13) << m.id;
  }
}

TEST(Complexity, RelabelingInvariant) {
  std::mt19937_64 rng(6);
  for (const char* name : {"benzene.mgf", "naphthalene.mgf", "chain.mgf", "fig3.mgf"}) {
    const MolecularGraph g = load(name);
    for (int i = 0; i < 25; ++i) {
      EXPECT_EQ(complexity(random_relabel(g, rng)).complexity, complexity(g).complexity);
    }
  }
}

TEST(LevelBins, DefaultEdgesAreInclusive) {
  const LevelBins bins;
  EXPECT_EQ(bins.level_of(9), 1);
  EXPECT_EQ(bins.level_of(40), 1);
  EXPECT_EQ(bins.level_of(41), 2);
  EXPECT_EQ(bins.level_of(200), 4);
  EXPECT_EQ(bins.level_of(201), 5);
  EXPECT_EQ(bins.level_of(10000), 5);
}

TEST(LevelBins, ParseAndMonotone) {
  const LevelBins bins = LevelBins::parse("10,20,30");
  EXPECT_EQ(bins.edges, (std::vector<long>{10, 20, 30}));
  int last = 0;
  for (long c = 0; c < 50; ++c) {
    EXPECT_GE(bins.level_of(c), last);
    last = bins.level_of(c);
  }
  EXPECT_EQ(last, 4);
  EXPECT_THROW(LevelBins::parse("10,5"), Error);
  EXPECT_THROW(LevelBins::parse("10,,20"), Error);
  EXPECT_THROW(LevelBins::parse("x"), Error);
}

TEST(Quintiles, SplitIntoEqualBins) {
  std::vector<long> values;
  for (long v = 1; v <= 10; ++v) values.push_back(v);
  EXPECT_EQ(quintile_edges(values), (std::vector<long>{2, 4, 6, 8}));
  std::mt19937_64 rng(1);
  std::vector<long> random;
  for (int i = 0; i < 1000; ++i) random.push_back(static_cast<long>(rng() % 100000));
  LevelBins bins;
  bins.edges = quintile_edges(random);
  std::vector<int> counts(6, 0);
  for (long v : random) ++counts[bins.level_of(v)];
  for (int level = 1; level <= 5; ++level) {
    EXPECT_NEAR(counts[level], 200, 5) << level;
  }
  EXPECT_TRUE(quintile_edges({}).empty());
}

namespace {

std::string rfl_samples(const std::vector<std::pair<std::string, MolecularGraph>>& mols) {
  std::string out;
  for (const auto& [id, g] : mols) out += id + "\t" + emit(split(g), Mode::Full) + "\n";
  return out;
}

std::string mgf_payload(const MolecularGraph& g) {
  std::vector<std::string> rows;
  std::string text = write_mgf(g);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    rows.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) out += (i ? ";" : "") + rows[i];
  return out;
}

}  // namespace

TEST(Evaluate, GoldAgainstItself) {
  CorpusSpec spec;
  spec.count = 6;
  spec.seed = 9;
  std::vector<std::pair<std::string, MolecularGraph>> mols;
  for (auto& m : generate_corpus(spec)) mols.emplace_back(m.id, m.graph);
  const std::string gold = rfl_samples(mols);
  const EvalResult r = evaluate(gold, gold, EvalFormat::Rfl, Vocabulary::builtin(), 3);
  EXPECT_DOUBLE_EQ(r.em, 1.0);
  EXPECT_DOUBLE_EQ(r.struct_em, 1.0);
  EXPECT_EQ(r.per_sample.size(), mols.size());
}

TEST(Evaluate, IsomorphicReserializationsAreStructOnly) {
  std::mt19937_64 rng(12);
  CorpusSpec spec;
  spec.count = 6;
  spec.seed = 10;
  std::string gold;
  std::string pred;
  for (const auto& m : generate_corpus(spec)) {
    gold += m.id + "\t" + mgf_payload(m.graph) + "\n";
    pred += m.id + "\t" + mgf_payload(random_relabel(m.graph, rng)) + "\n";
  }
  const EvalResult r = evaluate(pred, gold, EvalFormat::Mgf);
  EXPECT_LT(r.em, 1.0);
  EXPECT_DOUBLE_EQ(r.struct_em, 1.0);
  EXPECT_LE(r.em, r.struct_em);
}

TEST(Evaluate, SmilesAndMisses) {
  const std::string gold = "a\tCCO\nb\tC1CCCCC1\nc\tCC(C)C\nd\tCCN\n";
  const std::string pred = "a\tOCC\nb\tC1CCCCC1\nc\tC(\nd\tCCC\n";
  const EvalResult r = evaluate(pred, gold, EvalFormat::Smiles);
  ASSERT_EQ(r.per_sample.size(), 4u);
  EXPECT_FALSE(r.per_sample[0].em);
  EXPECT_TRUE(r.per_sample[0].struct_match);
  EXPECT_TRUE(r.per_sample[1].em);
  EXPECT_FALSE(r.per_sample[2].parsed);
  EXPECT_FALSE(r.per_sample[3].struct_match);
  EXPECT_DOUBLE_EQ(r.em, 0.25);
  EXPECT_DOUBLE_EQ(r.struct_em, 0.5);

  const EvalResult missing = evaluate("a\tCCO\n", gold, EvalFormat::Smiles);
  EXPECT_DOUBLE_EQ(missing.em, 0.25);
}

TEST(Evaluate, FileErrors) {
  auto code = [](const std::string& pred, const std::string& gold) {
    try {
      evaluate(pred, gold, EvalFormat::Smiles);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  EXPECT_EQ(code("z\tCC\n", "a\tCC\n"), ErrorCode::IdMismatch);
  EXPECT_EQ(code("", "a CC\n"), ErrorCode::FileFormatError);
  EXPECT_EQ(code("", "a\tCC\na\tCC\n"), ErrorCode::FileFormatError);
}

TEST(Evaluate, EmNeverExceedsStruct) {
  std::mt19937_64 rng(31);
  const char* pool[] = {"CC", "CCO", "OCC", "C1CC1", "CC(C)C", "C(C)(C)C", "C=C", "C#N", "", "C("};
  for (int run = 0; run < 50; ++run) {
    std::string gold;
    std::string pred;
    for (int i = 0; i < 8; ++i) {
      gold += "s" + std::to_string(i) + "\t" + pool[rng() % 8] + "\n";
      pred += "s" + std::to_string(i) + "\t" + pool[rng() % 10] + "\n";
    }
    const EvalResult r = evaluate(pred, gold, EvalFormat::Smiles);
    EXPECT_LE(r.em, r.struct_em);
    for (const SampleResult& s : r.per_sample) EXPECT_TRUE(!s.em || s.struct_match);
  }
}

TEST(Evaluate, ReportHasMachineLines) {
  const EvalResult r = evaluate("a\tCC\n", "a\tCC\n", EvalFormat::Smiles);
  const std::string report = format_report(r);
  EXPECT_NE(report.find("em\t1.000000\n"), std::string::npos);
  EXPECT_NE(report.find("struct_em\t1.000000\n"), std::string::npos);
  EXPECT_NE(report.find("samples\t1\n"), std::string::npos);
}
