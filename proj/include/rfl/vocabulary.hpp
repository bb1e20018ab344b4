#pragma once

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "rfl/error.hpp"

namespace rfl {

/// True for characters that terminate an atom label in RFL text.
inline bool is_rfl_delimiter(char c) {
  switch (c) {
    case '[': case ']': case '(': case ')':
    case '-': case '=': case '#': case '.':
      return true;
    default:
      return false;
  }
}

/// Set of atom/group labels allowed in RFL text.
class Vocabulary {
 public:
  Vocabulary() = default;

  static const Vocabulary& builtin() {
    static const Vocabulary v = [] {
      Vocabulary out;
      for (const char* l : kBuiltin) out.add(l);
      return out;
    }();
    return v;
  }

  /// Built-in labels plus one label per line of `text` ('#' starts a comment).
  static Vocabulary extended(std::string_view text) {
    Vocabulary v = builtin();
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(" \t\r");
      std::string label = line.substr(first, last - first + 1);
      if (!valid_label(label)) {
        throw Error(ErrorCode::FileFormatError,
                    "vocabulary line " + std::to_string(line_no) +
                        ": invalid label '" + label + "'",
                    line_no);
      }
      v.add(std::move(label));
    }
    return v;
  }

  static Vocabulary from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(ErrorCode::FileFormatError,
                  "cannot read vocabulary file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return extended(ss.str());
  }

  /// Built-in vocabulary, extended by the file named in RFL_VOCAB if set.
  static Vocabulary from_environment() {
    const char* path = std::getenv("RFL_VOCAB");
    if (path == nullptr || *path == '\0') return builtin();
    return from_file(path);
  }

  static bool valid_label(std::string_view label) {
    if (label.empty()) return false;
    for (char c : label) {
      const auto u = static_cast<unsigned char>(c);
      if (u <= 0x20 || u == 0x7f || is_rfl_delimiter(c)) return false;
    }
    return true;
  }

  void add(std::string label) { labels_.insert(std::move(label)); }

  bool contains(std::string_view label) const {
    return labels_.find(label) != labels_.end();
  }

  std::size_t size() const { return labels_.size(); }

 private:
  static constexpr const char* kBuiltin[] = {
      // elements
      "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al",
      "Si", "P", "S", "Cl", "Ar", "K", "Ca", "Ti", "Cr", "Mn", "Fe", "Co",
      "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Ag",
      "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "Pt", "Au", "Hg", "Pb", "Bi",
      // condensed groups common in textbook structures
      "CH", "CH2", "CH3", "CH4", "NH", "NH2", "NH3", "OH", "SH", "PH", "PH2",
      "OMe", "OEt", "Me", "Et", "Pr", "iPr", "Bu", "tBu", "Ph", "Bn", "Ac",
      "COOH", "CHO", "CN", "NO2", "SO3H", "CF3", "CCl3", "OCH3", "COO",
      "COOCH3", "CONH2", "Boc", "Ts", "R", "R1", "R2", "R3", "X", "Y", "Z"};

  std::set<std::string, std::less<>> labels_;
};

}  // namespace rfl
