#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rfl {

enum class ErrorCode {
  UnknownVertex,
  DuplicateBond,
  DuplicateAtom,
  SelfLoop,
  ParseError,
  BudgetExceeded,
  MalformedGraph,
  DanglingBranch,
  LeftoverBranch,
  UnknownSuper,
  LexError,
  GrammarError,
  ReservedTokenMisuse,
  UnresolvedSuperRef,
  BranchArityMismatch,
  UnsupportedFeature,
  UnknownLabel,
  FileFormatError,
  IdMismatch,
  GenerationStall,
  MissingSidecar,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::DuplicateBond: return "DuplicateBond";
    case ErrorCode::DuplicateAtom: return "DuplicateAtom";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::MalformedGraph: return "MalformedGraph";
    case ErrorCode::DanglingBranch: return "DanglingBranch";
    case ErrorCode::LeftoverBranch: return "LeftoverBranch";
    case ErrorCode::UnknownSuper: return "UnknownSuper";
    case ErrorCode::LexError: return "LexError";
    case ErrorCode::GrammarError: return "GrammarError";
    case ErrorCode::ReservedTokenMisuse: return "ReservedTokenMisuse";
    case ErrorCode::UnresolvedSuperRef: return "UnresolvedSuperRef";
    case ErrorCode::BranchArityMismatch: return "BranchArityMismatch";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::FileFormatError: return "FileFormatError";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::GenerationStall: return "GenerationStall";
    case ErrorCode::MissingSidecar: return "MissingSidecar";
  }
  return "Unknown";
}

/// Single exception type for the library. `position` is a byte offset for
/// text inputs and a 1-based line number for line-oriented formats.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(what), code_(code), position_(position) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
};

}  // namespace rfl
