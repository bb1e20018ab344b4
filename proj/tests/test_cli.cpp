#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "oracles.hpp"

using namespace rfl;
using namespace rfl::testing;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("rfl_cli_" + std::string(::testing::UnitTest::GetInstance()
                                         ->current_test_info()
                                         ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  CliRun run(const std::string& args, const std::string& env = "") const {
    const std::string out = path("stdout.txt");
    const std::string err = path("stderr.txt");
    const std::string cmd =
        env + " " + std::string(RFL_CLI) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(out);
    r.err = read_text(err);
    return r;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EncodeBenzeneHasOneRingSection) {
  const CliRun r = run("encode " + data_path("benzene.mgf"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "[Sa:0][ea]C=C-C=C-C=C-[ea][END]\n");
}

TEST_F(Cli, EncodeChainHasNoRingSection) {
  const CliRun r = run("encode --mode tokens --sidecar " + path("c.branch") + " " +
                    data_path("chain.mgf"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "C-C-C-C-C[END]\n");
  EXPECT_EQ(read_text(path("c.branch")), "");
}

TEST_F(Cli, MalformedInputNamesTheLine) {
  const CliRun r = run("encode " + data_path("malformed.mgf"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  EXPECT_NE(r.err.find("malformed.mgf:4:"), std::string::npos) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(Cli, BudgetExceeded) {
  std::string k7 = "mgf 1\n";
  for (int i = 0; i < 7; ++i) k7 += "a " + std::to_string(i) + " C\n";
  for (int a = 0; a < 7; ++a) {
    for (int b = a + 1; b < 7; ++b) {
      k7 += "b " + std::to_string(a) + " " + std::to_string(b) + " 1\n";
    }
  }
  std::ofstream(path("k7.mgf")) << k7;
  const CliRun r = run("encode --budget 20 " + path("k7.mgf"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("BudgetExceeded"), std::string::npos);
}

TEST_F(Cli, FullModeRoundTrip) {
  ASSERT_EQ(run("encode -o " + path("f.rfl") + " " + data_path("fig3.mgf")).code, 0);
  const CliRun r = run("decode -o " + path("back.mgf") + " " + path("f.rfl"));
  ASSERT_EQ(r.code, 0) << r.err;
  const MolecularGraph back = read_mgf(read_text(path("back.mgf")));
  EXPECT_EQ(back.atom_count(), 18u);
  EXPECT_TRUE(isomorphic(back, load("fig3.mgf")));
}

TEST_F(Cli, TokensModeUsesSidecarBesideTheFile) {
  ASSERT_EQ(run("encode --mode tokens -o " + path("t.rfl") + " " + data_path("fig3.mgf")).code, 0);
  EXPECT_EQ(read_text(path("t.branch")), "3 0 1\n2 0 4\n4 1 1\n");
  const CliRun r = run("decode " + path("t.rfl"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(isomorphic(read_mgf(r.out), load("fig3.mgf")));
}

TEST_F(Cli, TokensModeWithoutSidecarExits4) {
  std::ofstream(path("t.rfl")) << "[Sa:0][ea]C-C-[conn]C-C-C-[END]\n";
  const CliRun r = run("decode " + path("t.rfl"));
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("sidecar"), std::string::npos);
}

TEST_F(Cli, GrammarErrorReportsPosition) {
  std::ofstream(path("bad.rfl")) << "C-C-C\n";
  const CliRun r = run("decode " + path("bad.rfl"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.rfl:1:6"), std::string::npos) << r.err;
}

TEST_F(Cli, EntryOnUnrelatedBondExits2) {
  // bond token 0 does not touch [Sa:0]
  std::ofstream(path("d.rfl")) << "C-C-[Sa:0][ea]C-C-C-[conn][ea][F:0:0:2][END]\n";
  const CliRun r = run("decode " + path("d.rfl"));
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_NE(r.err.find("BranchArityMismatch"), std::string::npos);
}

TEST_F(Cli, GenCorpusThenRoundtripAndComplexity) {
  const std::string out = path("corpus");
  CliRun r = run("gen-corpus -o " + out + " -n 10 --seed 7 --jobs 3");
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(out)) files += e.path().extension() == ".mgf";
  EXPECT_EQ(files, 50u);

  r = run("roundtrip --jobs 4 " + out);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("50/50 passed"), std::string::npos);

  r = run("complexity " + out);
  ASSERT_EQ(r.code, 0);
  const std::string manifest = read_text(out + "/manifest.tsv");
  std::istringstream rows(r.out);
  std::string line;
  std::getline(rows, line);
  int checked = 0;
  while (std::getline(rows, line)) {
    std::istringstream cols(line);
    std::string file, atoms, bonds, rings, cx, level;
    std::getline(cols, file, '\t');
    std::getline(cols, atoms, '\t');
    std::getline(cols, bonds, '\t');
    std::getline(cols, rings, '\t');
    std::getline(cols, cx, '\t');
    std::getline(cols, level, '\t');
    const std::string id = fs::path(file).stem().string();
    EXPECT_NE(manifest.find(id + "\t" + cx + "\t"), std::string::npos) << id;
    ++checked;
  }
  EXPECT_EQ(checked, 50);

  const std::string again = path("again");
  ASSERT_EQ(run("gen-corpus -o " + again + " -n 10 --seed 7").code, 0);
  EXPECT_EQ(read_text(again + "/manifest.tsv"), manifest);
  EXPECT_EQ(read_text(again + "/mol_3_0004.mgf"), read_text(out + "/mol_3_0004.mgf"));
}

TEST_F(Cli, RoundtripReportsFailures) {
  fs::copy(data_path("benzene.mgf"), path("a.mgf"));
  fs::copy(data_path("malformed.mgf"), path("b.mgf"));
  const CliRun r = run("verify " + dir_.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("PASS " + path("a.mgf")), std::string::npos);
  EXPECT_NE(r.out.find("FAIL " + path("b.mgf")), std::string::npos);
  EXPECT_NE(r.out.find("1/2 passed"), std::string::npos);
}

TEST_F(Cli, ComplexityOfBenzene) {
  const CliRun r = run("complexity " + data_path("benzene.mgf"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "24\n");
}

TEST_F(Cli, EvalGoldAgainstItself) {
  std::ofstream(path("gold.tsv")) << "a\tCCO\nb\tC1CCCCC1\n";
  const CliRun r = run("eval --format smiles --pred " + path("gold.tsv") + " --gold " + path("gold.tsv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("em\t1.000000"), std::string::npos);
  EXPECT_NE(r.out.find("struct_em\t1.000000"), std::string::npos);
}

TEST_F(Cli, EvalBadGoldFile) {
  std::ofstream(path("gold.tsv")) << "a CCO\n";
  std::ofstream(path("pred.tsv")) << "";
  const CliRun r = run("eval --format smiles --pred " + path("pred.tsv") + " --gold " + path("gold.tsv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
}

TEST_F(Cli, SmilesInputAndVocabularyEnvironment) {
  std::ofstream(path("m.smi")) << "CC(C)O\n";
  CliRun r = run("encode " + path("m.smi"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "C-C(-C)-O[ea][END]\n");

  std::ofstream(path("x.mgf")) << "mgf 1\na 0 Qz\na 1 C\nb 0 1 1\n";
  r = run("encode " + path("x.mgf"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("UnknownLabel"), std::string::npos);
  std::ofstream(path("vocab.txt")) << "Qz\n";
  r = run("encode " + path("x.mgf"), "RFL_VOCAB=" + path("vocab.txt"));
  EXPECT_NE(r.out.find("Qz-C"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(run("").code, 0);
  EXPECT_NE(run("encode").code, 0);
  const CliRun r = run("encode --mode bogus " + data_path("benzene.mgf"));
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  EXPECT_EQ(run("--help").code, 0);
}
