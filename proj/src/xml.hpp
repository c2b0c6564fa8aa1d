#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parse_support.hpp"

namespace ftlab::detail {

/// Just enough XML for Open-PSA input: elements, attributes, character data,
/// comments, CDATA, processing instructions and DOCTYPE (the latter two
/// skipped). Every node remembers where its start tag began.
struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlElement> children;
  std::string text;
  SourcePos pos{1, 1};

  const std::string* attribute(std::string_view key) const;
};

/// Throws ParseError(kSyntax) on malformed markup.
XmlElement parse_xml(std::string_view source);

std::string xml_escape(std::string_view text);

}  // namespace ftlab::detail
