#include "xml.hpp"

#include <cstdint>

#include "ftlab/parse.hpp"

namespace ftlab::detail {

const std::string* XmlElement::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

class XmlReader {
 public:
  explicit XmlReader(std::string_view source) : src_(source) {}

  XmlElement document() {
    skip_misc();
    if (eof() || peek() != '<') fail("expected root element");
    XmlElement root = element();
    skip_misc();
    if (!eof()) fail("content after root element");
    return root;
  }

 private:
  bool eof() const { return i_ >= src_.size(); }
  char peek() const { return src_[i_]; }
  bool starts_with(std::string_view s) const {
    return src_.substr(i_, s.size()) == s;
  }

  SourcePos here() const { return {line_, column_}; }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i_ < src_.size(); ++k, ++i_) {
      if (src_[i_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    int column = column_;
    if (eof() && column > 1) --column;  // keep the position inside the source
    throw ParseError(ParseErrorCode::kSyntax, line_, column, message);
  }

  void skip_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' ||
                      peek() == '\n')) {
      advance();
    }
  }

  void skip_until(std::string_view terminator, const char* what) {
    auto at = src_.find(terminator, i_);
    if (at == std::string_view::npos) fail(std::string("unterminated ") + what);
    advance(at - i_ + terminator.size());
  }

  /// Whitespace, comments, processing instructions, DOCTYPE.
  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<!DOCTYPE")) {
        skip_until(">", "DOCTYPE");
      } else if (!eof() && static_cast<unsigned char>(peek()) == 0xEF &&
                 starts_with("\xEF\xBB\xBF")) {
        advance(3);
      } else {
        return;
      }
    }
  }

  static bool name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.' ||
           c == ':';
  }

  std::string name() {
    const std::size_t start = i_;
    while (!eof() && name_char(peek())) advance();
    if (start == i_) fail("expected name");
    return std::string(src_.substr(start, i_ - start));
  }

  void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  void entity(std::string& out) {
    auto semi = src_.find(';', i_);
    if (semi == std::string_view::npos || semi - i_ > 12) fail("bad entity");
    std::string_view ref = src_.substr(i_ + 1, semi - i_ - 1);
    if (ref == "lt") out.push_back('<');
    else if (ref == "gt") out.push_back('>');
    else if (ref == "amp") out.push_back('&');
    else if (ref == "quot") out.push_back('"');
    else if (ref == "apos") out.push_back('\'');
    else if (ref.size() > 1 && ref[0] == '#') {
      const bool hex = ref[1] == 'x' || ref[1] == 'X';
      std::string digits(ref.substr(hex ? 2 : 1));
      if (digits.empty()) fail("bad character reference");
      std::uint32_t cp = 0;
      for (char c : digits) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else fail("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
        if (cp > 0x10FFFF) fail("bad character reference");
      }
      append_utf8(out, cp);
    } else {
      fail("unknown entity '&" + std::string(ref) + ";'");
    }
    advance(semi - i_ + 1);
  }

  std::string attribute_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted value");
    const char quote = peek();
    advance();
    std::string out;
    while (!eof() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      if (peek() == '&') {
        entity(out);
      } else {
        out.push_back(peek());
        advance();
      }
    }
    if (eof()) fail("unterminated attribute value");
    advance();
    return out;
  }

  XmlElement element() {
    XmlElement el;
    el.pos = here();
    advance();  // '<'
    el.name = name();
    for (;;) {
      skip_space();
      if (eof()) fail("unterminated start tag");
      if (starts_with("/>")) {
        advance(2);
        return el;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      std::string key = name();
      skip_space();
      if (eof() || peek() != '=') fail("expected '=' after attribute name");
      advance();
      skip_space();
      if (el.attribute(key) != nullptr) fail("duplicate attribute '" + key + "'");
      std::string value = attribute_value();
      el.attributes.emplace_back(std::move(key), std::move(value));
    }
    for (;;) {
      if (eof()) fail("missing </" + el.name + ">");
      if (starts_with("</")) {
        advance(2);
        const SourcePos at = here();
        std::string closing = name();
        if (closing != el.name) {
          throw ParseError(ParseErrorCode::kSyntax, at.line, at.column,
                           "mismatched </" + closing + ">, expected </" +
                               el.name + ">");
        }
        skip_space();
        if (eof() || peek() != '>') fail("expected '>'");
        advance();
        return el;
      }
      if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        advance(9);
        auto at = src_.find("]]>", i_);
        if (at == std::string_view::npos) fail("unterminated CDATA");
        el.text += src_.substr(i_, at - i_);
        advance(at - i_ + 3);
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        el.children.push_back(element());
      } else if (peek() == '&') {
        entity(el.text);
      } else {
        el.text.push_back(peek());
        advance();
      }
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

XmlElement parse_xml(std::string_view source) {
  return XmlReader(source).document();
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace ftlab::detail
