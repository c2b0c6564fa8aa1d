#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ftlab/fault_tree.hpp"

namespace ftlab {

enum class ParseErrorCode {
  kSyntax,
  kDuplicateId,
  kUnknownRef,
  kBadNumber,
  kSemantic,
  kUnsupported,
};

std::string_view to_string(ParseErrorCode code) noexcept;

/// Parse failure located at a 1-based line/column of the source.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorCode code, int line, int column,
             const std::string& message);

  ParseErrorCode code() const noexcept { return code_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// Bare message without the position prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ParseErrorCode code_;
  int line_;
  int column_;
  std::string detail_;
};

/// Line-oriented fault-tree DSL:
///
///   # comment
///   top TOP = AND(G1, C)
///   gate G1 = KOFN[2](A, B, C) label="pump train"
///   basic A p=0.1
///
/// Declarations may appear in any order. The result always passes
/// validate(); invariant violations surface as kSemantic.
FaultTree parse_ftdsl(std::string_view source);

/// Canonical DSL text: top first, remaining gates in topological order, then
/// basic events; LF line endings; probabilities in shortest round-trip form.
std::string serialize_ftdsl(const FaultTree& tree);

/// Open-PSA MEF subset: define-fault-tree / model-data holding define-gate
/// (and, or, atleast) and define-basic-event with a <float> probability.
/// The top event is the single gate no other gate references.
FaultTree parse_openpsa(std::string_view source);

std::string serialize_openpsa(const FaultTree& tree,
                              std::string_view name = "FT");

enum class TreeFormat { kFtdsl, kOpenPsa };

/// Picks the format from the first non-blank character ('<' means XML).
TreeFormat detect_format(std::string_view source) noexcept;
FaultTree parse_tree(std::string_view source);
FaultTree load_tree(const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace ftlab
