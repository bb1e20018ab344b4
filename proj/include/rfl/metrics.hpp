#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfl/error.hpp"
#include "rfl/isomorphism.hpp"
#include "rfl/mgf.hpp"
#include "rfl/molgraph.hpp"
#include "rfl/parallel.hpp"
#include "rfl/rflcore.hpp"
#include "rfl/rfltext.hpp"
#include "rfl/ringsys.hpp"
#include "rfl/smiles.hpp"

namespace rfl {

/// Upper bounds (inclusive) of levels 1..n-1; anything above the last edge is
/// level n = edges.size() + 1.
struct LevelBins {
  std::vector<long> edges{40, 80, 130, 200};

  int level_of(long complexity) const {
    const auto it = std::lower_bound(edges.begin(), edges.end(), complexity);
    return static_cast<int>(it - edges.begin()) + 1;
  }

  /// Parses "40,80,130,200"; edges must be strictly ascending.
  static LevelBins parse(std::string_view text) {
    LevelBins bins;
    bins.edges.clear();
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      if (comma == std::string_view::npos) comma = text.size();
      long v = 0;
      if (!detail::parse_number(text.substr(pos, comma - pos), v)) {
        throw Error(ErrorCode::ParseError,
                    "bad bin edge '" +
                        std::string(text.substr(pos, comma - pos)) + "'");
      }
      if (!bins.edges.empty() && v <= bins.edges.back()) {
        throw Error(ErrorCode::ParseError, "bin edges must be ascending");
      }
      bins.edges.push_back(v);
      pos = comma + 1;
    }
    return bins;
  }
};

struct ComplexityReport {
  std::size_t n_atom = 0;
  std::size_t n_bond = 0;
  std::size_t n_ring = 0;
  long complexity = 0;
  int level = 1;
};

inline ComplexityReport complexity(const MolecularGraph& g,
                                   const LevelBins& bins = {},
                                   std::size_t cycle_budget = kDefaultCycleBudget) {
  ComplexityReport r;
  r.n_atom = g.atom_count();
  r.n_bond = g.bond_count();
  r.n_ring = non_nested_rings(g, cycle_budget).size();
  r.complexity = static_cast<long>(r.n_atom + r.n_bond + 12 * r.n_ring);
  r.level = bins.level_of(r.complexity);
  return r;
}

/// Edges splitting `values` into five bins of near-equal size (upper bounds
/// of the first four).
inline std::vector<long> quintile_edges(std::vector<long> values) {
  std::vector<long> edges;
  if (values.empty()) return edges;
  std::sort(values.begin(), values.end());
  for (int q = 1; q < 5; ++q) {
    const std::size_t idx = (values.size() * static_cast<std::size_t>(q) + 4) / 5;
    edges.push_back(values[std::max<std::size_t>(idx, 1) - 1]);
  }
  return edges;
}

enum class EvalFormat { Rfl, Mgf, Smiles };

inline std::optional<EvalFormat> eval_format_from_string(std::string_view s) {
  if (s == "rfl") return EvalFormat::Rfl;
  if (s == "mgf") return EvalFormat::Mgf;
  if (s == "smiles") return EvalFormat::Smiles;
  return std::nullopt;
}

struct SampleResult {
  std::string id;
  bool em = false;
  bool struct_match = false;
  bool parsed = false;
};

struct EvalResult {
  double em = 0.0;
  double struct_em = 0.0;
  std::vector<SampleResult> per_sample;
};

namespace detail {

/// `id<TAB>payload` lines keyed by id. Blank lines are skipped. A line
/// without a tab is an error in gold files and an empty payload otherwise.
inline std::map<std::string, std::string> read_samples(std::string_view text,
                                                       bool strict,
                                                       const char* what) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos && strict) {
      throw Error(ErrorCode::FileFormatError,
                  std::string(what) + " line " + std::to_string(line_no) +
                      ": expected 'id<TAB>payload'",
                  line_no);
    }
    std::string id(line.substr(0, tab));
    std::string payload(tab == std::string_view::npos ? std::string_view{}
                                                      : line.substr(tab + 1));
    if (id.empty()) {
      throw Error(ErrorCode::FileFormatError,
                  std::string(what) + " line " + std::to_string(line_no) +
                      ": empty sample id",
                  line_no);
    }
    if (!out.emplace(std::move(id), std::move(payload)).second) {
      throw Error(ErrorCode::FileFormatError,
                  std::string(what) + " line " + std::to_string(line_no) +
                      ": duplicate sample id",
                  line_no);
    }
  }
  return out;
}

struct Decoded {
  std::string normalized;
  MolecularGraph graph;
  bool has_graph = false;
  bool decoded = false;
};

inline std::optional<Decoded> decode_payload(const std::string& payload,
                                             EvalFormat format,
                                             const Vocabulary& vocab) {
  if (payload.empty()) return std::nullopt;
  Decoded d;
  try {
    switch (format) {
      case EvalFormat::Rfl: {
        const RflDocument doc = parse(payload, vocab);
        d.normalized = doc.to_string();
        if (doc.mode == Mode::Full) {
          d.graph = restore(to_split_result(doc));
          d.has_graph = true;
        }
        break;
      }
      case EvalFormat::Mgf: {
        std::string text = payload;
        std::replace(text.begin(), text.end(), ';', '\n');
        d.graph = read_mgf(text);
        d.normalized = write_mgf(d.graph);
        d.has_graph = true;
        break;
      }
      case EvalFormat::Smiles:
        d.normalized = payload;
        d.graph = import_smiles_subset(payload);
        d.has_graph = true;
        break;
    }
    d.decoded = true;
  } catch (const Error&) {
    if (d.normalized.empty()) return std::nullopt;
  }
  return d;
}

}  // namespace detail

/// Scores predictions against gold. em: normalized markup equal; struct:
/// em, or both decode to isomorphic graphs. Undecodable predictions and gold
/// samples without a prediction count as misses.
inline EvalResult evaluate(std::string_view pred_text,
                           std::string_view gold_text, EvalFormat format,
                           const Vocabulary& vocab = Vocabulary::builtin(),
                           unsigned jobs = 1) {
  const auto gold = detail::read_samples(gold_text, true, "gold");
  const auto pred = detail::read_samples(pred_text, false, "prediction");
  for (const auto& [id, payload] : pred) {
    if (!gold.count(id)) {
      throw Error(ErrorCode::IdMismatch,
                  "prediction id '" + id + "' not present in gold");
    }
  }
  EvalResult result;
  std::vector<const std::pair<const std::string, std::string>*> items;
  for (const auto& item : gold) items.push_back(&item);
  result.per_sample.resize(items.size());
  parallel_for(items.size(), jobs, [&](std::size_t i) {
    const auto& [id, gold_payload] = *items[i];
    SampleResult& s = result.per_sample[i];
    s.id = id;
    auto it = pred.find(id);
    if (it == pred.end()) return;
    const auto p = detail::decode_payload(it->second, format, vocab);
    const auto g = detail::decode_payload(gold_payload, format, vocab);
    if (!p || !g) return;
    s.parsed = p->decoded;
    s.em = p->normalized == g->normalized;
    s.struct_match =
        s.em || (p->has_graph && g->has_graph && isomorphic(p->graph, g->graph));
  });
  std::size_t em = 0;
  std::size_t st = 0;
  for (const SampleResult& s : result.per_sample) {
    em += s.em ? 1 : 0;
    st += s.struct_match ? 1 : 0;
  }
  if (!result.per_sample.empty()) {
    result.em = static_cast<double>(em) / result.per_sample.size();
    result.struct_em = static_cast<double>(st) / result.per_sample.size();
  }
  return result;
}

/// Human-readable table followed by `metric<TAB>value` lines.
inline std::string format_report(const EvalResult& r) {
  std::size_t em = 0;
  std::size_t st = 0;
  std::size_t parsed = 0;
  for (const SampleResult& s : r.per_sample) {
    em += s.em ? 1 : 0;
    st += s.struct_match ? 1 : 0;
    parsed += s.parsed ? 1 : 0;
  }
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "metric      value     count\n"
                "samples     %-9zu %zu\n"
                "decoded     %-9zu %zu\n"
                "EM          %-9.4f %zu\n"
                "Struct-EM   %-9.4f %zu\n"
                "\n"
                "samples\t%zu\nem\t%.6f\nstruct_em\t%.6f\n",
                r.per_sample.size(), r.per_sample.size(), parsed, parsed, r.em,
                em, r.struct_em, st, r.per_sample.size(), r.em, r.struct_em);
  return buf;
}

}  // namespace rfl
