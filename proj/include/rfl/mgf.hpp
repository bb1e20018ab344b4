#pragma once

#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "rfl/molgraph.hpp"

// MGF: line-oriented native graph format.
//
//   mgf 1
//   # comment
//   a <id> <label> [<x> <y>]
//   b <from> <to> <order 1|2|3>

namespace rfl {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r') {
      ++j;
    }
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is not available everywhere; strtod on a copy
    std::string tmp(s);
    char* end = nullptr;
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size();
  } else {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  }
}

inline std::string format_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

inline MolecularGraph read_mgf(std::string_view text) {
  MolecularGraph g;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": " + msg, line_no);
  };
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto fields = detail::split_ws(line);
    if (fields.empty() || fields[0].front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "mgf" || fields[1] != "1") {
        fail("expected header 'mgf 1'");
      }
      header_seen = true;
    } else if (fields[0] == "a") {
      if (fields.size() != 3 && fields.size() != 5) {
        fail("atom record needs 'a <id> <label> [<x> <y>]'");
      }
      Atom atom;
      if (!detail::parse_number(fields[1], atom.id) || atom.id < 0) {
        fail("bad atom id '" + std::string(fields[1]) + "'");
      }
      atom.label = std::string(fields[2]);
      if (fields.size() == 5) {
        Point p;
        if (!detail::parse_number(fields[3], p.x) ||
            !detail::parse_number(fields[4], p.y)) {
          fail("bad coordinates");
        }
        atom.coords = p;
      }
      if (g.has_atom(atom.id)) {
        fail("duplicate atom id " + std::to_string(atom.id));
      }
      g.insert_atom(std::move(atom));
    } else if (fields[0] == "b") {
      if (fields.size() != 4) fail("bond record needs 'b <from> <to> <order>'");
      VertexId from = 0;
      VertexId to = 0;
      int order = 0;
      if (!detail::parse_number(fields[1], from) ||
          !detail::parse_number(fields[2], to) ||
          !detail::parse_number(fields[3], order)) {
        fail("bad bond record");
      }
      auto kind = bond_order_from_int(order);
      if (!kind) fail("bond order must be 1, 2 or 3");
      try {
        g.add_bond(from, to, *kind);
      } catch (const Error& e) {
        fail(e.what());
      }
    } else {
      fail("unknown record '" + std::string(fields[0]) + "'");
    }
    if (end == text.size()) break;
  }
  if (!header_seen) {
    throw Error(ErrorCode::ParseError, "line 1: missing 'mgf 1' header", 1);
  }
  return g;
}

inline std::string write_mgf(const MolecularGraph& g) {
  std::ostringstream out;
  out << "mgf 1\n";
  for (const Atom& a : g.atoms()) {
    out << "a " << a.id << ' ' << a.label;
    if (a.coords) {
      out << ' ' << detail::format_coord(a.coords->x) << ' '
          << detail::format_coord(a.coords->y);
    }
    out << '\n';
  }
  for (const Bond& b : g.bonds()) {
    out << "b " << b.from << ' ' << b.to << ' ' << to_int(b.order) << '\n';
  }
  return out.str();
}

}  // namespace rfl
