#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "ftlab/fault_tree.hpp"

namespace ftlab::detail {

struct SourcePos {
  int line;
  int column;
};

/// Where each vertex was declared and where each (parent, child) reference
/// appeared, so validation failures can point back into the source.
struct PositionTable {
  std::map<std::string, SourcePos, std::less<>> decls;
  std::map<std::pair<std::string, std::string>, SourcePos> refs;
};

std::optional<double> parse_double(std::string_view text);
std::optional<int> parse_int(std::string_view text);

/// Runs validate() and throws kSemantic for the first violation.
void check_semantics(const FaultTree& tree, const PositionTable& positions);

}  // namespace ftlab::detail
