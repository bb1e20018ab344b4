#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "rfl/error.hpp"
#include "rfl/mgf.hpp"
#include "rfl/molgraph.hpp"
#include "rfl/rflcore.hpp"
#include "rfl/vocabulary.hpp"

// RFL text (whitespace-free, one document per line):
//
//   doc      := skeleton ( "[ea]" ring )* ( "[ea]" entry* )? "[END]"
//   skeleton := ( chain ( "." chain )* )?
//   chain    := atom ( "(" bond chain ")" )* ( bond chain )?
//   ring     := ( atom bond "[conn]"* ){3,}
//   atom     := label | "[Sa:k]"
//   bond     := "-" | "=" | "#" | "[Sb:k]" | "[Sb:k:r]"
//   entry    := "[F:s:r:i]"
//
// The trailing entry section is present only in full mode. In an entry, s is
// the index of a bond token counted over the whole document (skeleton first,
// then ring sections), r a ring section and i a bond of that ring.

namespace rfl {

enum class Mode { Tokens, Full };

enum class TokenKind {
  Atom,
  Bond,
  BranchOpen,
  BranchClose,
  SuperAtom,
  SuperBond,
  Ea,
  Conn,
  Dot,
  Entry,
  End,
};

/// One `[F:s:r:i]` record; also the line format of `.branch` sidecars.
struct BranchEntry {
  std::size_t bond_token = 0;
  std::size_t ring = 0;
  std::size_t ring_bond = 0;
  auto operator<=>(const BranchEntry&) const = default;
};

struct Token {
  Token() = default;
  Token(TokenKind k, std::string t, std::size_t pos = 0)
      : kind(k), text(std::move(t)), position(pos) {}

  TokenKind kind = TokenKind::Atom;
  std::string text;
  std::size_t position = 0;  // byte offset in the parsed text
  BondOrder order = BondOrder::Single;
  std::size_t ref = 0;  // SuperAtom / SuperBond ring index
  bool reversed = false;
  BranchEntry entry;

  bool operator==(const Token& other) const {
    return kind == other.kind && text == other.text;
  }
};

struct RflDocument {
  std::vector<Token> skeleton_tokens;
  std::vector<std::vector<Token>> ring_sections;
  std::vector<BranchEntry> branch_table;
  Mode mode = Mode::Full;

  std::string to_string() const {
    std::string out;
    for (const Token& t : skeleton_tokens) out += t.text;
    for (const auto& section : ring_sections) {
      out += "[ea]";
      for (const Token& t : section) out += t.text;
    }
    if (mode == Mode::Full) {
      out += "[ea]";
      for (const BranchEntry& e : branch_table) out += entry_text(e);
    }
    out += "[END]";
    return out;
  }

  std::size_t conn_count() const {
    std::size_t n = 0;
    for (const auto& section : ring_sections) {
      n += static_cast<std::size_t>(std::count_if(
          section.begin(), section.end(),
          [](const Token& t) { return t.kind == TokenKind::Conn; }));
    }
    return n;
  }

  static std::string entry_text(const BranchEntry& e) {
    return "[F:" + std::to_string(e.bond_token) + ":" +
           std::to_string(e.ring) + ":" + std::to_string(e.ring_bond) + "]";
  }

  bool operator==(const RflDocument&) const = default;
};

namespace detail {

inline constexpr std::size_t kMaxBranchDepth = 4096;

inline Token atom_token(const std::string& label) {
  return {TokenKind::Atom, label};
}

inline Token super_atom_token(std::size_t k) {
  Token t{TokenKind::SuperAtom, "[Sa:" + std::to_string(k) + "]"};
  t.ref = k;
  return t;
}

inline Token bond_token(BondOrder order) {
  static const char* kText[] = {"", "-", "=", "#"};
  Token t{TokenKind::Bond, kText[to_int(order)]};
  t.order = order;
  return t;
}

inline Token super_bond_token(std::size_t k, bool reversed) {
  Token t{TokenKind::SuperBond,
          "[Sb:" + std::to_string(k) + (reversed ? ":r]" : "]")};
  t.ref = k;
  t.reversed = reversed;
  return t;
}

inline bool is_atom(const Token& t) {
  return t.kind == TokenKind::Atom || t.kind == TokenKind::SuperAtom;
}

inline bool is_bond(const Token& t) {
  return t.kind == TokenKind::Bond || t.kind == TokenKind::SuperBond;
}

[[noreturn]] inline void lex_error(const std::string& msg, std::size_t pos) {
  throw Error(ErrorCode::LexError,
              "at byte " + std::to_string(pos) + ": " + msg, pos);
}

[[noreturn]] inline void grammar_error(const std::string& msg,
                                       std::size_t pos) {
  throw Error(ErrorCode::GrammarError,
              "at byte " + std::to_string(pos) + ": " + msg, pos);
}

struct SkeletonBondShape {
  std::size_t left = 0;   // index into atoms
  std::size_t right = 0;  // index into atoms
  std::size_t token = 0;  // index into skeleton tokens
};

/// Atoms (as token indices) and bonds of a skeleton token list, in text order.
struct SkeletonShape {
  std::vector<std::size_t> atoms;
  std::vector<SkeletonBondShape> bonds;
};

inline SkeletonShape skeleton_shape(const std::vector<Token>& tokens,
                                    std::size_t end_position) {
  enum class State { ExpectAtom, AfterAtom, AfterClose, ExpectBond };
  SkeletonShape shape;
  if (tokens.empty()) return shape;
  State state = State::ExpectAtom;
  std::vector<std::size_t> open;
  std::size_t cur = 0;
  bool has_pending = false;
  std::size_t pending_atom = 0;
  std::size_t pending_token = 0;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind == TokenKind::Conn) {
      grammar_error("[conn] may only follow a ring bond", t.position);
    }
    switch (state) {
      case State::ExpectAtom:
        if (!is_atom(t)) grammar_error("expected atom", t.position);
        shape.atoms.push_back(i);
        if (has_pending) {
          shape.bonds.push_back(
              {pending_atom, shape.atoms.size() - 1, pending_token});
          has_pending = false;
        }
        cur = shape.atoms.size() - 1;
        state = State::AfterAtom;
        break;
      case State::AfterAtom:
        if (t.kind == TokenKind::BranchOpen) {
          if (open.size() >= kMaxBranchDepth) {
            grammar_error("branches nested too deeply", t.position);
          }
          open.push_back(cur);
          state = State::ExpectBond;
        } else if (is_bond(t)) {
          has_pending = true;
          pending_atom = cur;
          pending_token = i;
          state = State::ExpectAtom;
        } else if (t.kind == TokenKind::BranchClose) {
          if (open.empty()) grammar_error("unmatched ')'", t.position);
          cur = open.back();
          open.pop_back();
          state = State::AfterClose;
        } else if (t.kind == TokenKind::Dot) {
          if (!open.empty()) grammar_error("expected ')'", t.position);
          state = State::ExpectAtom;
        } else {
          grammar_error("expected '(', ')', '.' or bond", t.position);
        }
        break;
      case State::AfterClose:
        if (t.kind == TokenKind::BranchOpen) {
          if (open.size() >= kMaxBranchDepth) {
            grammar_error("branches nested too deeply", t.position);
          }
          open.push_back(cur);
          state = State::ExpectBond;
        } else if (is_bond(t)) {
          has_pending = true;
          pending_atom = cur;
          pending_token = i;
          state = State::ExpectAtom;
        } else {
          grammar_error("expected '(' or bond after branch", t.position);
        }
        break;
      case State::ExpectBond:
        if (!is_bond(t)) grammar_error("expected bond", t.position);
        has_pending = true;
        pending_atom = open.back();
        pending_token = i;
        state = State::ExpectAtom;
        break;
    }
  }
  if (state == State::ExpectAtom) {
    grammar_error("expected atom", end_position);
  }
  if (state == State::ExpectBond || state == State::AfterClose) {
    grammar_error("expected bond", end_position);
  }
  if (!open.empty()) grammar_error("expected ')'", end_position);
  return shape;
}

/// Token indices of a ring section: atoms[i], bonds[i] and the number of
/// [conn] markers after bonds[i].
struct RingShape {
  std::vector<std::size_t> atoms;
  std::vector<std::size_t> bonds;
  std::vector<std::size_t> conns;
};

inline RingShape ring_shape(const std::vector<Token>& tokens,
                            std::size_t end_position) {
  RingShape shape;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!is_atom(tokens[i])) {
      grammar_error("expected ring atom", tokens[i].position);
    }
    shape.atoms.push_back(i++);
    if (i == tokens.size()) grammar_error("expected ring bond", end_position);
    if (!is_bond(tokens[i])) {
      grammar_error("expected ring bond", tokens[i].position);
    }
    shape.bonds.push_back(i++);
    std::size_t conns = 0;
    while (i < tokens.size() && tokens[i].kind == TokenKind::Conn) {
      ++conns;
      ++i;
    }
    shape.conns.push_back(conns);
  }
  if (shape.atoms.size() < 3) {
    grammar_error("ring section needs at least 3 atoms",
                  tokens.empty() ? end_position : tokens.front().position);
  }
  return shape;
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  if (s.size() > 1 && s[0] == '0') return std::nullopt;
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

inline std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t c = s.find(':', start);
    if (c == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, c - start));
    start = c + 1;
  }
}

inline Token bracket_token(std::string_view inner, std::size_t pos) {
  auto misuse = [&](const std::string& msg) {
    throw Error(ErrorCode::ReservedTokenMisuse,
                "at byte " + std::to_string(pos) + ": " + msg, pos);
  };
  const std::string text = "[" + std::string(inner) + "]";
  if (inner == "ea") return {TokenKind::Ea, text, pos};
  if (inner == "conn") return {TokenKind::Conn, text, pos};
  if (inner == "END") return {TokenKind::End, text, pos};
  const auto parts = split_colon(inner);
  if (parts[0] == "Sa") {
    if (parts.size() != 2 || !parse_index(parts[1])) {
      misuse("expected [Sa:k], got " + text);
    }
    Token t = super_atom_token(*parse_index(parts[1]));
    t.position = pos;
    return t;
  }
  if (parts[0] == "Sb") {
    if (parts.size() < 2 || parts.size() > 3 || !parse_index(parts[1]) ||
        (parts.size() == 3 && parts[2] != "r")) {
      misuse("expected [Sb:k] or [Sb:k:r], got " + text);
    }
    Token t = super_bond_token(*parse_index(parts[1]), parts.size() == 3);
    t.position = pos;
    return t;
  }
  if (parts[0] == "F") {
    if (parts.size() != 4 || !parse_index(parts[1]) ||
        !parse_index(parts[2]) || !parse_index(parts[3])) {
      misuse("expected [F:s:r:i], got " + text);
    }
    Token t{TokenKind::Entry, text, pos};
    t.entry = {*parse_index(parts[1]), *parse_index(parts[2]),
               *parse_index(parts[3])};
    return t;
  }
  if (parts[0] == "conn" || parts[0] == "ea" || parts[0] == "END") {
    misuse("reserved token " + text + " takes no arguments");
  }
  throw Error(ErrorCode::LexError,
              "at byte " + std::to_string(pos) + ": unknown bracket token " +
                  text,
              pos);
}

/// Splits text into tokens up to and including [END]. Only a single LF may
/// follow [END].
inline std::vector<Token> lex(std::string_view text, const Vocabulary& vocab) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const auto u = static_cast<unsigned char>(c);
    if (!out.empty() && out.back().kind == TokenKind::End) {
      if (c == '\n' && i + 1 == text.size()) return out;
      grammar_error("text after [END]", i);
    }
    if (u <= 0x20 || u == 0x7f) {
      lex_error("unexpected control or whitespace character", i);
    }
    switch (c) {
      case '(':
        out.push_back({TokenKind::BranchOpen, "(", i++});
        continue;
      case ')':
        out.push_back({TokenKind::BranchClose, ")", i++});
        continue;
      case '.':
        out.push_back({TokenKind::Dot, ".", i++});
        continue;
      case '-':
      case '=':
      case '#': {
        Token t = bond_token(c == '-'   ? BondOrder::Single
                             : c == '=' ? BondOrder::Double
                                        : BondOrder::Triple);
        t.position = i++;
        out.push_back(t);
        continue;
      }
      case ']':
        lex_error("unmatched ']'", i);
      case '[': {
        const std::size_t close = text.find(']', i + 1);
        const std::size_t next_open = text.find('[', i + 1);
        if (close == std::string_view::npos ||
            (next_open != std::string_view::npos && next_open < close)) {
          lex_error("unterminated '['", i);
        }
        out.push_back(bracket_token(text.substr(i + 1, close - i - 1), i));
        i = close + 1;
        continue;
      }
      default:
        break;
    }
    std::size_t j = i;
    while (j < text.size() && !is_rfl_delimiter(text[j]) &&
           static_cast<unsigned char>(text[j]) > 0x20 &&
           static_cast<unsigned char>(text[j]) != 0x7f) {
      ++j;
    }
    const std::string label(text.substr(i, j - i));
    if (!vocab.contains(label)) {
      throw Error(ErrorCode::UnknownLabel,
                  "at byte " + std::to_string(i) + ": label '" + label +
                      "' is not in the vocabulary",
                  i);
    }
    Token t = atom_token(label);
    t.position = i;
    out.push_back(std::move(t));
    i = j;
  }
  if (out.empty() || out.back().kind != TokenKind::End) {
    grammar_error("expected [END]", text.size());
  }
  return out;
}

}  // namespace detail

/// Tokenizes and checks `text` against the RFL grammar.
inline RflDocument parse(std::string_view text,
                         const Vocabulary& vocab = Vocabulary::builtin()) {
  const std::vector<Token> tokens = detail::lex(text, vocab);
  std::vector<std::vector<Token>> sections(1);
  std::vector<std::size_t> section_end;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::Ea || t.kind == TokenKind::End) {
      section_end.push_back(t.position);
      if (t.kind == TokenKind::Ea) sections.emplace_back();
      continue;
    }
    sections.back().push_back(t);
  }

  RflDocument doc;
  doc.mode = Mode::Tokens;
  const bool has_table =
      sections.size() >= 2 &&
      std::all_of(sections.back().begin(), sections.back().end(),
                  [](const Token& t) { return t.kind == TokenKind::Entry; });
  if (has_table) {
    doc.mode = Mode::Full;
    for (const Token& t : sections.back()) doc.branch_table.push_back(t.entry);
    sections.pop_back();
  }
  for (std::size_t s = 0; s < sections.size(); ++s) {
    for (const Token& t : sections[s]) {
      if (t.kind == TokenKind::Entry) {
        detail::grammar_error("[F:...] entries belong in the final section",
                              t.position);
      }
      if (s > 0 && (t.kind == TokenKind::BranchOpen ||
                    t.kind == TokenKind::BranchClose ||
                    t.kind == TokenKind::Dot)) {
        detail::grammar_error("'" + t.text + "' is not allowed in a ring",
                              t.position);
      }
    }
  }
  detail::skeleton_shape(sections[0], section_end[0]);
  for (std::size_t s = 1; s < sections.size(); ++s) {
    detail::ring_shape(sections[s], section_end[s]);
  }
  if (sections[0].empty() && sections.size() > 1) {
    detail::grammar_error("empty skeleton before ring sections", 0);
  }
  doc.skeleton_tokens = std::move(sections[0]);
  doc.ring_sections.assign(std::make_move_iterator(sections.begin() + 1),
                           std::make_move_iterator(sections.end()));
  return doc;
}

namespace detail {

/// Position of every skeleton bond in the final document, as global
/// bond-token indices, and the first bond token of each ring section.
struct BondTokenIndex {
  std::map<Edge, std::size_t> skeleton;
  std::vector<std::size_t> ring_offset;

  std::size_t of(const BondHome& home) const {
    if (!home.in_skeleton) return ring_offset[home.ring_index] + home.bond_index;
    auto it = skeleton.find(home.ends);
    if (it == skeleton.end()) {
      throw Error(ErrorCode::DanglingBranch,
                  "tracked bond " + std::to_string(home.ends.first) + "-" +
                      std::to_string(home.ends.second) +
                      " is not in the skeleton");
    }
    return it->second;
  }
};

inline std::vector<BranchEntry> branch_entries(const SplitResult& sr,
                                               const Trajectories& traj,
                                               const BondTokenIndex& at) {
  std::vector<BranchEntry> out;
  for (std::size_t li = 0; li < sr.branches.size(); ++li) {
    const BranchLink& l = sr.branches[li];
    const auto i = sr.rings[l.ring_index].index_of(l.skeleton_bond.to);
    out.push_back({at.of(traj.link_home[li]), l.ring_index, *i});
  }
  std::sort(out.begin(), out.end(),
            [](const BranchEntry& a, const BranchEntry& b) {
              return std::tie(a.ring, a.ring_bond, a.bond_token) <
                     std::tie(b.ring, b.ring_bond, b.bond_token);
            });
  return out;
}

}  // namespace detail

/// Serializes a split result. The skeleton is written depth-first from the
/// smallest vertex id, neighbors ascending, every child but the last in
/// parentheses. Ring sections follow in merge order.
inline RflDocument to_document(const SplitResult& sr, Mode mode,
                               const Vocabulary& vocab = Vocabulary::builtin()) {
  const auto maps = detail::merge_maps(sr);
  const auto traj = detail::track_branches(sr, maps);
  std::map<VertexId, std::size_t> sa_ring;
  for (const SuperAtomRef& r : sr.super_atoms) sa_ring[r.vertex] = r.ring_index;
  // SuperBonds by final position: ring k and the vertex its u side ended on
  using SuperAt = std::pair<std::size_t, VertexId>;
  std::map<detail::Edge, SuperAt> skel_super;
  std::map<std::pair<std::size_t, std::size_t>, SuperAt> ring_super;
  for (std::size_t k = 0; k < sr.rings.size(); ++k) {
    if (!traj.super_home[k]) continue;
    const auto& [home, u_end] = *traj.super_home[k];
    if (home.in_skeleton) {
      skel_super[home.ends] = {k, u_end};
    } else {
      ring_super[{home.ring_index, home.bond_index}] = {k, u_end};
    }
  }

  auto atom_tok = [&](const Atom& a) {
    if (auto it = sa_ring.find(a.id); it != sa_ring.end()) {
      return detail::super_atom_token(it->second);
    }
    if (!vocab.contains(a.label)) {
      throw Error(ErrorCode::UnknownLabel,
                  "atom " + std::to_string(a.id) + " label '" + a.label +
                      "' is not in the vocabulary");
    }
    return detail::atom_token(a.label);
  };
  auto bond_tok = [&](const Bond& b, VertexId left, const SuperAt* super) {
    if (super) return detail::super_bond_token(super->first, super->second != left);
    if (b.is_super) {
      throw Error(ErrorCode::UnknownSuper,
                  "super bond " + std::to_string(b.from) + "-" +
                      std::to_string(b.to) + " has no ring");
    }
    return detail::bond_token(b.order);
  };
  auto skel_bond_tok = [&](const Bond& b, VertexId left) {
    auto it = skel_super.find(b.key().unordered());
    return bond_tok(b, left, it == skel_super.end() ? nullptr : &it->second);
  };

  RflDocument doc;
  doc.mode = mode;
  detail::BondTokenIndex at;
  std::size_t bond_tokens = 0;

  const MolecularGraph& g = sr.skeleton;
  if (!is_acyclic(g)) {
    throw Error(ErrorCode::MalformedGraph, "skeleton contains a cycle");
  }
  struct Item {
    enum Kind { Visit, Emit } kind;
    VertexId v = 0;
    VertexId parent = -1;
    Token token;
  };
  std::set<VertexId> seen;
  for (VertexId root : g.vertex_ids()) {
    if (seen.count(root)) continue;
    if (!doc.skeleton_tokens.empty()) {
      doc.skeleton_tokens.push_back({TokenKind::Dot, "."});
    }
    std::vector<Item> stack{{Item::Visit, root, -1, {}}};
    seen.insert(root);
    while (!stack.empty()) {
      Item item = std::move(stack.back());
      stack.pop_back();
      if (item.kind == Item::Emit) {
        if (detail::is_bond(item.token)) {
          at.skeleton[detail::edge_of(item.parent, item.v)] = bond_tokens++;
        }
        doc.skeleton_tokens.push_back(std::move(item.token));
        continue;
      }
      doc.skeleton_tokens.push_back(atom_tok(g.atom(item.v)));
      std::vector<VertexId> children;
      for (VertexId w : g.neighbors(item.v)) {
        if (w != item.parent) children.push_back(w);
      }
      for (VertexId w : children) seen.insert(w);
      // pushed in reverse so they pop in text order
      for (std::size_t c = children.size(); c-- > 0;) {
        const VertexId w = children[c];
        const bool last = c + 1 == children.size();
        if (!last) stack.push_back({Item::Emit, 0, -1, {TokenKind::BranchClose, ")"}});
        stack.push_back({Item::Visit, w, item.v, {}});
        stack.push_back(
            {Item::Emit, w, item.v, skel_bond_tok(*g.find_bond(item.v, w), item.v)});
        if (!last) stack.push_back({Item::Emit, 0, -1, {TokenKind::BranchOpen, "("}});
      }
    }
  }

  std::vector<std::vector<std::size_t>> conns(sr.rings.size());
  for (std::size_t k = 0; k < sr.rings.size(); ++k) {
    conns[k].assign(sr.rings[k].size(), 0);
  }
  for (const BranchLink& l : sr.branches) {
    if (l.ring_index >= sr.rings.size()) {
      throw Error(ErrorCode::LeftoverBranch,
                  "branch link references ring " +
                      std::to_string(l.ring_index));
    }
    const auto i = sr.rings[l.ring_index].index_of(l.skeleton_bond.to);
    if (!i) {
      throw Error(ErrorCode::DanglingBranch,
                  "branch anchor " + std::to_string(l.skeleton_bond.to) +
                      " is not on ring " + std::to_string(l.ring_index));
    }
    ++conns[l.ring_index][*i];
  }
  for (std::size_t k = 0; k < sr.rings.size(); ++k) {
    const StoredRing& ring = sr.rings[k];
    at.ring_offset.push_back(bond_tokens);
    std::vector<Token> section;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      section.push_back(atom_tok(ring.atoms[i]));
      auto sup = ring_super.find({k, i});
      section.push_back(bond_tok(ring.bonds[i], ring.atoms[i].id,
                                 sup == ring_super.end() ? nullptr : &sup->second));
      ++bond_tokens;
      for (std::size_t c = 0; c < conns[k][i]; ++c) {
        section.push_back({TokenKind::Conn, "[conn]"});
      }
    }
    doc.ring_sections.push_back(std::move(section));
  }
  if (mode == Mode::Full) doc.branch_table = detail::branch_entries(sr, traj, at);
  return doc;
}

inline std::string emit(const SplitResult& sr, Mode mode,
                        const Vocabulary& vocab = Vocabulary::builtin()) {
  return to_document(sr, mode, vocab).to_string();
}

/// Branch table of `sr` as it would appear in full mode (the tokens-mode
/// sidecar).
inline std::vector<BranchEntry> sidecar_entries(const SplitResult& sr) {
  RflDocument doc = to_document(sr, Mode::Full);
  return doc.branch_table;
}

inline std::string write_sidecar(const std::vector<BranchEntry>& entries) {
  std::string out;
  for (const BranchEntry& e : entries) {
    out += std::to_string(e.bond_token) + " " + std::to_string(e.ring) + " " +
           std::to_string(e.ring_bond) + "\n";
  }
  return out;
}

inline std::vector<BranchEntry> read_sidecar(std::string_view text) {
  std::vector<BranchEntry> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto fields = detail::split_ws(text.substr(pos, end - pos));
    pos = end + 1;
    if (fields.empty() || fields[0].front() == '#') continue;
    std::optional<std::size_t> v[3];
    if (fields.size() == 3) {
      for (int f = 0; f < 3; ++f) v[f] = detail::parse_index(fields[f]);
    }
    if (!v[0] || !v[1] || !v[2]) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) +
                      ": expected 's_idx r_ring r_idx'",
                  line_no);
    }
    out.push_back({*v[0], *v[1], *v[2]});
  }
  return out;
}

namespace detail {

[[noreturn]] inline void unresolved(const std::string& msg,
                                    std::optional<std::size_t> pos = {}) {
  throw Error(ErrorCode::UnresolvedSuperRef, msg, pos);
}

[[noreturn]] inline void arity(const std::string& msg) {
  throw Error(ErrorCode::BranchArityMismatch, msg);
}

}  // namespace detail

/// Rebuilds the split result a document was emitted from (up to vertex ids).
/// Tokens-mode documents need the branch entries from their sidecar.
inline SplitResult to_split_result(
    const RflDocument& doc,
    const std::optional<std::vector<BranchEntry>>& sidecar = std::nullopt) {
  if (doc.mode == Mode::Tokens && !sidecar) {
    throw Error(ErrorCode::MissingSidecar,
                "tokens-mode document needs a branch sidecar to decode");
  }
  const std::vector<BranchEntry>& entries =
      doc.mode == Mode::Full ? doc.branch_table : *sidecar;
  const std::size_t k_rings = doc.ring_sections.size();

  const detail::SkeletonShape skel =
      detail::skeleton_shape(doc.skeleton_tokens, 0);
  std::vector<detail::RingShape> rings;
  for (const auto& section : doc.ring_sections) {
    rings.push_back(detail::ring_shape(section, 0));
  }

  // Section index k_rings stands for the skeleton.
  auto section_tokens = [&](std::size_t s) -> const std::vector<Token>& {
    return s == k_rings ? doc.skeleton_tokens : doc.ring_sections[s];
  };

  // Where each ring is referenced: (section, token index).
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> ref_at(
      k_rings);
  std::vector<bool> is_sb(k_rings, false);
  auto note_ref = [&](const Token& t, std::size_t section, std::size_t tok) {
    if (t.ref >= k_rings) {
      detail::unresolved("reference " + t.text + " but only " +
                             std::to_string(k_rings) + " ring sections",
                         t.position);
    }
    if (t.ref >= section) {
      detail::unresolved(t.text + " must be referenced from a later section",
                         t.position);
    }
    if (ref_at[t.ref]) {
      detail::unresolved("ring " + std::to_string(t.ref) +
                             " referenced more than once",
                         t.position);
    }
    ref_at[t.ref] = std::pair{section, tok};
    is_sb[t.ref] = t.kind == TokenKind::SuperBond;
  };
  for (std::size_t s = 0; s <= k_rings; ++s) {
    const auto& toks = section_tokens(s);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].kind == TokenKind::SuperBond) note_ref(toks[i], s, i);
    }
  }
  for (std::size_t s = 0; s <= k_rings; ++s) {
    const auto& toks = section_tokens(s);
    std::set<std::size_t> endpoints;
    if (s < k_rings && is_sb[s]) {
      endpoints = {rings[s].atoms.front(), rings[s].atoms.back()};
    }
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].kind == TokenKind::SuperAtom && !endpoints.count(i)) {
        note_ref(toks[i], s, i);
      }
    }
  }
  for (std::size_t k = 0; k < k_rings; ++k) {
    if (!ref_at[k]) {
      detail::unresolved("ring " + std::to_string(k) + " is never referenced");
    }
  }

  // Global bond-token indices: skeleton bonds first, then ring sections.
  std::size_t total_bonds = skel.bonds.size();
  std::vector<std::size_t> ring_offset;
  for (const auto& shape : rings) {
    ring_offset.push_back(total_bonds);
    total_bonds += shape.bonds.size();
  }
  auto global_index = [&](std::size_t section, std::size_t tok) {
    if (section == k_rings) {
      for (std::size_t b = 0; b < skel.bonds.size(); ++b) {
        if (skel.bonds[b].token == tok) return b;
      }
    } else {
      const auto& bonds = rings[section].bonds;
      for (std::size_t i = 0; i < bonds.size(); ++i) {
        if (bonds[i] == tok) return ring_offset[section] + i;
      }
    }
    detail::unresolved("dangling bond token");
  };
  std::map<std::size_t, std::size_t> super_on;  // bond token -> ring
  for (std::size_t k = 0; k < k_rings; ++k) {
    if (is_sb[k]) super_on[global_index(ref_at[k]->first, ref_at[k]->second)] = k;
  }

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> expected_conn;
  std::map<std::size_t, std::vector<BranchEntry>> by_token;
  for (const BranchEntry& e : entries) {
    if (e.ring >= k_rings || e.ring_bond >= rings[e.ring].bonds.size() ||
        e.bond_token >= total_bonds) {
      detail::arity("branch entry " + RflDocument::entry_text(e) +
                    " is out of range");
    }
    ++expected_conn[{e.ring, e.ring_bond}];
    by_token[e.bond_token].push_back(e);
  }
  for (std::size_t k = 0; k < k_rings; ++k) {
    for (std::size_t i = 0; i < rings[k].conns.size(); ++i) {
      auto it = expected_conn.find({k, i});
      const std::size_t want = it == expected_conn.end() ? 0 : it->second;
      if (rings[k].conns[i] != want) {
        detail::arity("ring " + std::to_string(k) + " bond " +
                      std::to_string(i) + " has " +
                      std::to_string(rings[k].conns[i]) +
                      " [conn] markers but " + std::to_string(want) +
                      " branch entries");
      }
    }
  }
  // Entries on a token carrying [Sb:k] split into those recorded before
  // ring k was merged and those after; each half has at most one per side.
  struct EntrySets {
    std::vector<BranchEntry> before;
    std::vector<BranchEntry> after;
  };
  std::map<std::size_t, EntrySets> sets;
  for (auto& [s, group] : by_token) {
    std::sort(group.begin(), group.end(),
              [](const BranchEntry& a, const BranchEntry& b) {
                return a.ring < b.ring;
              });
    auto sup = super_on.find(s);
    EntrySets& es = sets[s];
    for (const BranchEntry& e : group) {
      if (sup != super_on.end() && e.ring == sup->second) {
        detail::arity("branch entry " + RflDocument::entry_text(e) +
                      " points at the SuperBond of its own ring");
      }
      (sup != super_on.end() && e.ring > sup->second ? es.after : es.before)
          .push_back(e);
    }
    for (const auto* half : {&es.before, &es.after}) {
      if (half->size() > 2) {
        detail::arity("bond token " + std::to_string(s) + " carries " +
                      std::to_string(group.size()) + " branch entries");
      }
      if (half->size() == 2 && (*half)[0].ring == (*half)[1].ring) {
        detail::arity("bond token " + std::to_string(s) +
                      " has two entries from ring " +
                      std::to_string((*half)[0].ring));
      }
    }
  }

  // Vertex ids: skeleton atoms in text order, then rings from last to first.
  // A SuperBond ring's ends are resolved from where its bond finally sits,
  // walking back along the entries recorded after the merge.
  SplitResult sr;
  sr.rings.resize(k_rings);
  std::vector<detail::MergeMap> maps(k_rings);
  std::vector<VertexId> skel_ids(skel.atoms.size());
  std::map<VertexId, const Token*> id_text;
  VertexId next = 0;
  for (std::size_t i = 0; i < skel_ids.size(); ++i) {
    skel_ids[i] = next++;
    id_text[skel_ids[i]] = &doc.skeleton_tokens[skel.atoms[i]];
  }
  std::vector<std::vector<VertexId>> ring_ids(k_rings);

  auto chain = [&](VertexId v, std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) {
      if (maps[k].deleted.count(v)) v = maps[k].target(v);
    }
    return v;
  };
  auto token_home = [&](std::size_t s)
      -> std::pair<std::size_t, std::pair<VertexId, VertexId>> {
    if (s < skel.bonds.size()) {
      const auto& b = skel.bonds[s];
      return {k_rings, {skel_ids[b.left], skel_ids[b.right]}};
    }
    std::size_t h = k_rings;
    while (ring_offset[--h] > s) {}
    const std::size_t i = s - ring_offset[h];
    const std::size_t n = rings[h].atoms.size();
    return {h, {ring_ids[h][i], ring_ids[h][(i + 1) % n]}};
  };
  auto anchor = [&](const BranchEntry& e) { return ring_ids[e.ring][e.ring_bond]; };
  auto make_atom = [&](const Token& t, VertexId id) {
    return Atom{id, t.kind == TokenKind::SuperAtom ? kSuperAtomLabel : t.text,
                std::nullopt};
  };
  auto closing_order = [&](std::size_t k) {
    return doc.ring_sections[k][rings[k].bonds.back()].order;
  };
  auto make_bond = [&](const Token& t, VertexId left, VertexId right) {
    if (t.kind == TokenKind::SuperBond) {
      if (t.reversed) std::swap(left, right);
      return Bond{left, right, closing_order(t.ref), true};
    }
    return Bond{left, right, t.order, false};
  };
  auto id_at = [&](std::size_t section, std::size_t tok) {
    const auto& atoms = section == k_rings ? skel.atoms : rings[section].atoms;
    const auto& ids = section == k_rings ? skel_ids : ring_ids[section];
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i] == tok) return ids[i];
    }
    detail::unresolved("dangling SuperAtom token");
  };

  std::vector<std::optional<SuperAtomRef>> sa_refs(k_rings);
  std::vector<std::optional<SuperBondRef>> sb_refs(k_rings);
  for (std::size_t k = k_rings; k-- > 0;) {
    const auto& shape = rings[k];
    const auto& toks = doc.ring_sections[k];
    const std::size_t n = shape.atoms.size();
    ring_ids[k].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (is_sb[k] && (i == 0 || i + 1 == n)) continue;
      ring_ids[k][i] = next++;
      id_text[ring_ids[k][i]] = &toks[shape.atoms[i]];
    }
    if (is_sb[k]) {
      const auto [section, tok] = *ref_at[k];
      const std::size_t s = global_index(section, tok);
      const auto [h, ends] = token_home(s);
      const bool reversed = section_tokens(section)[tok].reversed;
      const VertexId final_u = reversed ? ends.second : ends.first;
      const VertexId final_v = reversed ? ends.first : ends.second;
      VertexId u = final_u;
      VertexId v = final_v;
      const auto& after = sets[s].after;
      if (!after.empty()) {
        const VertexId c = chain(anchor(after[0]), after[0].ring, h);
        const bool first_is_u = c == final_u;
        if (!first_is_u && c != final_v) {
          detail::arity("branch entry " + RflDocument::entry_text(after[0]) +
                        " does not reach its bond token");
        }
        (first_is_u ? u : v) = anchor(after[0]);
        if (after.size() == 2) (first_is_u ? v : u) = anchor(after[1]);
      }
      ring_ids[k][0] = u;
      ring_ids[k][n - 1] = v;
      for (std::size_t i : {std::size_t{0}, n - 1}) {
        const Token& here = toks[shape.atoms[i]];
        auto there = id_text.find(ring_ids[k][i]);
        if (u == v || there == id_text.end() ||
            here.text != there->second->text) {
          detail::unresolved("SuperBond end " + here.text + " of ring " +
                                 std::to_string(k) +
                                 " does not match the bond it was kept on",
                             here.position);
        }
      }
    }

    StoredRing& ring = sr.rings[k];
    for (std::size_t i = 0; i < n; ++i) {
      ring.atoms.push_back(make_atom(toks[shape.atoms[i]], ring_ids[k][i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      // bonds inside a ring keep the ring's direction
      Bond b = make_bond(toks[shape.bonds[i]], ring_ids[k][i],
                         ring_ids[k][(i + 1) % n]);
      b.from = ring_ids[k][i];
      b.to = ring_ids[k][(i + 1) % n];
      ring.bonds.push_back(b);
    }
    if (is_sb[k]) {
      sb_refs[k] = SuperBondRef{{ring_ids[k][0], ring_ids[k][n - 1]}, k};
      maps[k] = detail::make_merge_map(ring, SuperKind::Bond, -1,
                                       sb_refs[k]->bond);
    } else {
      sa_refs[k] = SuperAtomRef{id_at(ref_at[k]->first, ref_at[k]->second), k};
      maps[k] = detail::make_merge_map(ring, SuperKind::Atom, sa_refs[k]->vertex,
                                       {});
    }
  }
  for (std::size_t k = 0; k < k_rings; ++k) {
    if (sa_refs[k]) sr.super_atoms.push_back(*sa_refs[k]);
    if (sb_refs[k]) sr.super_bonds.push_back(*sb_refs[k]);
  }

  for (std::size_t i = 0; i < skel.atoms.size(); ++i) {
    const Token& t = doc.skeleton_tokens[skel.atoms[i]];
    sr.skeleton.insert_atom(make_atom(t, skel_ids[i]));
    if (t.kind == TokenKind::SuperAtom) {
      sr.skeleton.set_super_atom(skel_ids[i]);
    }
  }
  for (const auto& b : skel.bonds) {
    sr.skeleton.add_bond(make_bond(doc.skeleton_tokens[b.token],
                                   skel_ids[b.left], skel_ids[b.right]));
  }

  // Branch links. Within one half of a token's entries, a lone entry's
  // skeleton end is the side it did not move; with two, the later one's is
  // the earlier anchor carried forward.
  auto link_for = [&](const BranchEntry& e, VertexId x) {
    const StoredRing& ring = sr.rings[e.ring];
    const VertexId d = ring.atoms[e.ring_bond].id;
    const VertexId w = ring.atoms[(e.ring_bond + 1) % ring.size()].id;
    return BranchLink{{x, d}, {d, w}, e.ring};
  };
  auto resolve = [&](std::size_t s, const std::vector<BranchEntry>& half,
                     std::pair<VertexId, VertexId> ends, std::size_t until) {
    if (half.empty()) return;
    if (half.back().ring >= until) {
      detail::arity("branch entry " + RflDocument::entry_text(half.back()) +
                    " points at a bond removed before ring " +
                    std::to_string(half.back().ring));
    }
    if (half.size() == 1) {
      const BranchEntry& e = half[0];
      const VertexId c = chain(anchor(e), e.ring, until);
      if (c != ends.first && c != ends.second) {
        detail::arity("branch entry " + RflDocument::entry_text(e) +
                      " does not reach bond token " + std::to_string(s));
      }
      sr.branches.push_back(link_for(e, c == ends.first ? ends.second : ends.first));
      return;
    }
    sr.branches.push_back(link_for(half[0], anchor(half[1])));
    sr.branches.push_back(
        link_for(half[1], chain(anchor(half[0]), half[0].ring, half[1].ring)));
  };
  for (const auto& [s, es] : sets) {
    const auto [h, ends] = token_home(s);
    auto sup = super_on.find(s);
    if (sup == super_on.end()) {
      resolve(s, es.before, ends, h);
    } else {
      const std::size_t k = sup->second;
      resolve(s, es.before, {sb_refs[k]->bond.from, sb_refs[k]->bond.to}, k);
      resolve(s, es.after, ends, h);
    }
  }
  std::sort(sr.branches.begin(), sr.branches.end(),
            [&](const BranchLink& a, const BranchLink& b) {
              const auto ia = *sr.rings[a.ring_index].index_of(a.skeleton_bond.to);
              const auto ib = *sr.rings[b.ring_index].index_of(b.skeleton_bond.to);
              return std::tie(a.ring_index, ia, a.skeleton_bond.from) <
                     std::tie(b.ring_index, ib, b.skeleton_bond.from);
            });
  return sr;
}

}  // namespace rfl
