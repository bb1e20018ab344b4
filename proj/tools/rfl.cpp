#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rfl/rfl.hpp"

namespace fs = std::filesystem;
using namespace rfl;

namespace {

// Raised for command-line mistakes that CLI11 cannot see.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::LexError:
    case ErrorCode::GrammarError:
    case ErrorCode::ReservedTokenMisuse:
    case ErrorCode::UnknownLabel:
    case ErrorCode::UnsupportedFeature:
    case ErrorCode::FileFormatError:
    case ErrorCode::UnresolvedSuperRef:
    case ErrorCode::BranchArityMismatch:
      return 2;
    case ErrorCode::BudgetExceeded:
      return 3;
    case ErrorCode::DanglingBranch:
    case ErrorCode::LeftoverBranch:
    case ErrorCode::MissingSidecar:
      return 4;
    default:
      return 1;
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

// An Error raised while handling one file, with a file:line location.
struct FileError {
  std::string path;
  std::string text;  // file contents, to turn byte offsets into lines
  bool line_positions = false;
  Error error;

  std::string where() const {
    std::string out = path;
    const auto pos = error.position();
    if (!pos) return out;
    if (line_positions) return out + ":" + std::to_string(*pos);
    const std::size_t p = std::min(*pos, text.size());
    const auto line = std::count(text.begin(), text.begin() + p, '\n') + 1;
    const auto bol = text.rfind('\n', p == 0 ? 0 : p - 1);
    const std::size_t col = bol == std::string::npos || p == 0 ? p + 1 : p - bol;
    return out + ":" + std::to_string(line) + ":" + std::to_string(col);
  }

  std::string message() const {
    std::string msg = error.what();
    // mgf messages already lead with "line N: "
    if (line_positions && msg.rfind("line ", 0) == 0) {
      if (auto colon = msg.find(": "); colon != std::string::npos) {
        msg.erase(0, colon + 2);
      }
    }
    return where() + ": " + to_string(error.code()) + ": " + one_line(msg);
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw UsageError("cannot write " + path);
}

bool is_smiles_path(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  return ext == ".smi" || ext == ".smiles";
}

MolecularGraph load_graph(const std::string& path, const std::string& format) {
  const std::string text = read_file(path);
  const bool smiles = format == "smiles" || (format == "auto" && is_smiles_path(path));
  try {
    if (smiles) {
      std::string s = text;
      while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) {
        s.pop_back();
      }
      return import_smiles_subset(s);
    }
    return read_mgf(text);
  } catch (const Error& e) {
    throw FileError{path, text, !smiles, e};
  }
}

// Files named on the command line; directories contribute their graph files.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const std::string& in : inputs) {
    if (!fs::is_directory(in)) {
      out.push_back(in);
      continue;
    }
    std::vector<std::string> found;
    for (const auto& entry : fs::directory_iterator(in)) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = entry.path().extension().string();
      if (ext == ".mgf" || ext == ".smi" || ext == ".smiles") {
        found.push_back(entry.path().string());
      }
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

Mode parse_mode(const std::string& s) {
  return s == "tokens" ? Mode::Tokens : Mode::Full;
}

struct Options {
  std::string mode = "full";
  std::string sidecar;
  std::string output;
  std::string input_format = "auto";
  std::size_t budget = kDefaultCycleBudget;
  unsigned jobs = 1;
};

int cmd_encode(const std::string& input, const Options& o) {
  const MolecularGraph g = load_graph(input, o.input_format);
  const Vocabulary vocab = Vocabulary::from_environment();
  const SplitResult sr = split(g, SplitOptions{o.budget});
  const Mode mode = parse_mode(o.mode);
  write_output(o.output, emit(sr, mode, vocab) + "\n");
  if (mode == Mode::Tokens) {
    std::string sidecar = o.sidecar;
    if (sidecar.empty() && !o.output.empty() && o.output != "-") {
      sidecar = fs::path(o.output).replace_extension(".branch").string();
    }
    if (sidecar.empty()) {
      throw UsageError("tokens mode writes a branch sidecar: give --sidecar or -o");
    }
    write_output(sidecar, write_sidecar(sidecar_entries(sr)));
  } else if (!o.sidecar.empty()) {
    throw UsageError("--sidecar only applies to --mode tokens");
  }
  return 0;
}

int cmd_decode(const std::string& input, const Options& o) {
  const std::string text = read_file(input);
  const Vocabulary vocab = Vocabulary::from_environment();
  try {
    const RflDocument doc = parse(text, vocab);
    std::optional<std::vector<BranchEntry>> entries;
    if (doc.mode == Mode::Tokens) {
      std::string sidecar = o.sidecar;
      const std::string beside = fs::path(input).replace_extension(".branch").string();
      if (sidecar.empty() && fs::exists(beside)) sidecar = beside;
      if (!sidecar.empty()) {
        const std::string side = read_file(sidecar);
        try {
          entries = read_sidecar(side);
        } catch (const Error& e) {
          throw FileError{sidecar, side, true, e};
        }
      }
    }
    write_output(o.output, write_mgf(restore(to_split_result(doc, entries))));
  } catch (const Error& e) {
    throw FileError{input, text, false, e};
  }
  return 0;
}

// Split, text round trip in both modes, and isomorphism of the restored
// graph. Returns an empty string on success.
std::string check_roundtrip(const MolecularGraph& g, std::size_t budget) {
  const SplitResult sr = split(g, SplitOptions{budget});
  if (!is_acyclic(sr.skeleton)) return "skeleton is not acyclic";
  if (!isomorphic(g, restore(sr))) return "restore is not isomorphic";
  for (Mode mode : {Mode::Full, Mode::Tokens}) {
    const std::string text = emit(sr, mode);
    const RflDocument doc = parse(text);
    if (doc.to_string() != text) return "parse(emit) changed the text";
    std::optional<std::vector<BranchEntry>> side;
    if (mode == Mode::Tokens) {
      side = read_sidecar(write_sidecar(sidecar_entries(sr)));
      if (doc.conn_count() != sr.branches.size()) return "[conn] count != |F|";
    }
    if (!isomorphic(g, restore(to_split_result(doc, side)))) {
      return "decoded text is not isomorphic";
    }
  }
  return {};
}

int cmd_roundtrip(const std::vector<std::string>& inputs, const Options& o) {
  const auto files = expand_inputs(inputs);
  if (files.empty()) throw UsageError("no input files");
  std::vector<std::string> verdict(files.size());
  parallel_for(files.size(), o.jobs, [&](std::size_t i) {
    try {
      const std::string why = check_roundtrip(load_graph(files[i], o.input_format), o.budget);
      verdict[i] = why.empty() ? "PASS " + files[i] : "FAIL " + files[i] + ": " + why;
    } catch (const FileError& e) {
      verdict[i] = "FAIL " + e.message();
    } catch (const Error& e) {
      verdict[i] = "FAIL " + files[i] + ": " + to_string(e.code()) + ": " +
                   one_line(e.what());
    } catch (const std::exception& e) {
      verdict[i] = "FAIL " + files[i] + ": " + one_line(e.what());
    }
  });
  std::size_t passed = 0;
  for (const std::string& v : verdict) {
    std::cout << v << "\n";
    passed += v.rfind("PASS", 0) == 0 ? 1 : 0;
  }
  std::cout << passed << "/" << files.size() << " passed\n";
  return passed == files.size() ? 0 : 1;
}

int cmd_complexity(const std::vector<std::string>& inputs, const Options& o,
                   const std::string& bins_text) {
  const LevelBins bins = bins_text.empty() ? LevelBins{} : LevelBins::parse(bins_text);
  const auto files = expand_inputs(inputs);
  if (files.empty()) throw UsageError("no input files");
  std::vector<ComplexityReport> reports(files.size());
  parallel_for(files.size(), o.jobs, [&](std::size_t i) {
    reports[i] = complexity(load_graph(files[i], o.input_format), bins, o.budget);
  });
  if (files.size() == 1 && !fs::is_directory(inputs.front())) {
    std::cout << reports[0].complexity << "\n";
    return 0;
  }
  std::cout << "file\tn_atom\tn_bond\tn_ring\tcomplexity\tlevel\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& r = reports[i];
    std::cout << files[i] << "\t" << r.n_atom << "\t" << r.n_bond << "\t"
              << r.n_ring << "\t" << r.complexity << "\t" << r.level << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& pred, const std::string& gold,
             const std::string& format, const Options& o) {
  const auto fmt = eval_format_from_string(format);
  if (!fmt) throw UsageError("unknown --format '" + format + "'");
  const std::string pred_text = read_file(pred);
  const std::string gold_text = read_file(gold);
  const Vocabulary vocab = Vocabulary::from_environment();
  const EvalResult r = evaluate(pred_text, gold_text, *fmt, vocab, o.jobs);
  std::cout << format_report(r);
  return 0;
}

struct GenOptions {
  std::string out_dir;
  std::size_t count = 10;
  std::string levels;
  std::uint64_t seed = 0;
  int max_rings_fused = 4;
  int max_atoms = 60;
};

int cmd_gen_corpus(const GenOptions& go, const Options& o) {
  CorpusSpec spec;
  spec.count = go.count;
  if (!go.levels.empty()) spec.levels = parse_levels(go.levels);
  spec.seed = go.seed;
  spec.max_rings_fused = go.max_rings_fused;
  spec.max_atoms = go.max_atoms;
  const auto mols = generate_corpus(spec, o.jobs);
  fs::create_directories(go.out_dir);
  for (const auto& m : mols) {
    write_output((fs::path(go.out_dir) / (m.id + ".mgf")).string(), write_mgf(m.graph));
  }
  write_output((fs::path(go.out_dir) / "manifest.tsv").string(), corpus_manifest(mols));
  std::cerr << "wrote " << mols.size() << " molecules to " << go.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ring-Free Language codec: encode, decode, verify, score, generate"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--budget", o.budget, "Cycle enumeration budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--input-format", o.input_format, "auto|mgf|smiles")
        ->check(CLI::IsMember({"auto", "mgf", "smiles"}));
  };
  auto add_jobs = [&](CLI::App* cmd) {
    cmd->add_option("-j,--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  std::string input;
  std::vector<std::string> inputs;

  auto* encode = app.add_subcommand("encode", "Graph (.mgf or SMILES) to RFL text");
  encode->add_option("input", input, "Input file")->required();
  encode->add_option("-o,--output", o.output, "Output file (default stdout)");
  encode->add_option("--mode", o.mode, "tokens|full")
      ->check(CLI::IsMember({"tokens", "full"}));
  encode->add_option("--sidecar", o.sidecar, "Branch sidecar path (tokens mode, default <output>.branch)");
  add_common(encode);

  auto* decode = app.add_subcommand("decode", "RFL text to .mgf");
  decode->add_option("input", input, "Input .rfl file")->required();
  decode->add_option("-o,--output", o.output, "Output file (default stdout)");
  decode->add_option("--sidecar", o.sidecar,
                     "Branch sidecar for tokens mode (default <input>.branch)");

  auto* roundtrip = app.add_subcommand("roundtrip", "Check the codec round trip per file");
  roundtrip->alias("verify");
  roundtrip->add_option("inputs", inputs, "Files or directories")->required();
  add_common(roundtrip);
  add_jobs(roundtrip);

  std::string bins;
  auto* cx = app.add_subcommand("complexity", "n_atom + n_bond + 12 n_ring");
  cx->add_option("inputs", inputs, "Files or directories")->required();
  cx->add_option("--bins", bins, "Level upper bounds, e.g. 40,80,130,200");
  add_common(cx);
  add_jobs(cx);

  std::string pred;
  std::string gold;
  std::string format = "rfl";
  auto* ev = app.add_subcommand("eval", "EM and Struct-EM of predictions against gold");
  ev->add_option("--pred", pred, "Predictions, id<TAB>payload per line")->required();
  ev->add_option("--gold", gold, "Gold, id<TAB>payload per line")->required();
  ev->add_option("--format", format, "rfl|mgf|smiles")
      ->check(CLI::IsMember({"rfl", "mgf", "smiles"}));
  add_jobs(ev);

  GenOptions go;
  auto* gen = app.add_subcommand("gen-corpus", "Generate a complexity-stratified corpus");
  gen->add_option("-o,--out", go.out_dir, "Output directory")->required();
  gen->add_option("-n,--count", go.count, "Molecules per level")->check(CLI::PositiveNumber);
  gen->add_option("--levels", go.levels, "Complexity intervals, e.g. 9-40,41-80");
  gen->add_option("--seed", go.seed, "Random seed");
  gen->add_option("--max-rings-fused", go.max_rings_fused, "Largest fused ring system");
  gen->add_option("--max-atoms", go.max_atoms, "Atom cap per molecule");
  add_jobs(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  }

  try {
    if (*encode) return cmd_encode(input, o);
    if (*decode) return cmd_decode(input, o);
    if (*roundtrip) return cmd_roundtrip(inputs, o);
    if (*cx) return cmd_complexity(inputs, o, bins);
    if (*ev) return cmd_eval(pred, gold, format, o);
    if (*gen) return cmd_gen_corpus(go, o);
  } catch (const FileError& e) {
    std::cerr << "error: " << e.message() << "\n";
    return exit_code(e.error.code());
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << one_line(e.what()) << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 1;
}
