#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "ftlab/parse.hpp"
#include "parse_support.hpp"

namespace ftlab {

std::string_view to_string(ParseErrorCode code) noexcept {
  switch (code) {
    case ParseErrorCode::kSyntax: return "SYNTAX";
    case ParseErrorCode::kDuplicateId: return "DUPLICATE_ID";
    case ParseErrorCode::kUnknownRef: return "UNKNOWN_REF";
    case ParseErrorCode::kBadNumber: return "BAD_NUMBER";
    case ParseErrorCode::kSemantic: return "SEMANTIC";
    case ParseErrorCode::kUnsupported: return "UNSUPPORTED";
  }
  return "UNKNOWN";
}

ParseError::ParseError(ParseErrorCode code, int line, int column,
                       const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + std::string(to_string(code)) + ": " + message),
      code_(code),
      line_(line),
      column_(column),
      detail_(message) {}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

namespace detail {

std::optional<double> parse_double(std::string_view text) {
  double value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

void check_semantics(const FaultTree& tree, const PositionTable& positions) {
  const ValidationReport report = validate(tree);
  if (report.ok) return;
  const Violation& v = report.violations.front();
  SourcePos pos{1, 1};
  if (auto arrow = v.locus.find("->"); arrow != std::string::npos) {
    std::string child = v.locus.substr(0, arrow);
    std::string parent = v.locus.substr(arrow + 2);
    if (auto it = positions.refs.find({parent, child});
        it != positions.refs.end()) {
      pos = it->second;
    } else if (auto d = positions.decls.find(parent);
               d != positions.decls.end()) {
      pos = d->second;
    }
  } else if (auto it = positions.decls.find(v.locus);
             it != positions.decls.end()) {
    pos = it->second;
  }
  throw ParseError(ParseErrorCode::kSemantic, pos.line, pos.column,
                   std::string(to_string(v.code)) + ": " + v.message +
                       (v.locus.empty() ? "" : " (" + v.locus + ")"));
}

}  // namespace detail

namespace {

using detail::SourcePos;

enum class TokenKind { kIdent, kWord, kString, kPunct, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  int column;
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

bool is_punct(char c) {
  return c == '=' || c == '(' || c == ')' || c == ',' || c == '[' || c == ']';
}

/// Splits one source line into tokens. A "word" is any other run of
/// non-delimiter characters, used for numbers.
std::vector<Token> tokenize(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const int column = static_cast<int>(i) + 1;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '#') {
      break;
    } else if (is_punct(c)) {
      out.push_back({TokenKind::kPunct, std::string(1, c), column});
      ++i;
    } else if (c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '\\' && i + 1 < line.size()) {
          const char e = line[i + 1];
          if (e == 'n') text.push_back('\n');
          else text.push_back(e);
          i += 2;
        } else if (line[i] == '"') {
          closed = true;
          ++i;
          break;
        } else {
          text.push_back(line[i++]);
        }
      }
      if (!closed) {
        throw ParseError(ParseErrorCode::kSyntax, line_no, column,
                         "unterminated string");
      }
      out.push_back({TokenKind::kString, std::move(text), column});
    } else {
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
             line[j] != '\r' && line[j] != '#' && line[j] != '"' &&
             !is_punct(line[j])) {
        ++j;
      }
      std::string text(line.substr(i, j - i));
      const bool ident = ident_start(text.front()) &&
                         std::all_of(text.begin(), text.end(), ident_char);
      out.push_back({ident ? TokenKind::kIdent : TokenKind::kWord,
                     std::move(text), column});
      i = j;
    }
  }
  out.push_back({TokenKind::kEnd, "", static_cast<int>(line.size()) + 1});
  return out;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, int line_no)
      : tokens_(std::move(tokens)), line_(line_no) {}

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }
  bool at_end() const { return peek().kind == TokenKind::kEnd; }

  [[noreturn]] void fail(ParseErrorCode code, const Token& at,
                         const std::string& message) const {
    throw ParseError(code, line_, at.column, message);
  }

  const Token& expect_ident(const char* what) {
    const Token& t = next();
    if (t.kind != TokenKind::kIdent) {
      fail(ParseErrorCode::kSyntax, t, std::string("expected ") + what);
    }
    return t;
  }

  void expect_punct(char c) {
    const Token& t = next();
    if (t.kind != TokenKind::kPunct || t.text[0] != c) {
      fail(ParseErrorCode::kSyntax, t, std::string("expected '") + c + "'");
    }
  }

  bool accept_punct(char c) {
    if (peek().kind == TokenKind::kPunct && peek().text[0] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  /// Optional trailing `label="..."`, then end of line.
  std::string finish() {
    std::string label;
    if (peek().kind == TokenKind::kIdent && peek().text == "label") {
      next();
      expect_punct('=');
      const Token& t = next();
      if (t.kind != TokenKind::kString) {
        fail(ParseErrorCode::kSyntax, t, "expected quoted label");
      }
      label = t.text;
    }
    if (!at_end()) fail(ParseErrorCode::kSyntax, peek(), "unexpected token");
    return label;
  }

  int line() const { return line_; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int line_;
};

struct PendingRef {
  std::string parent;
  std::string child;
  SourcePos pos;
};

}  // namespace

FaultTree parse_ftdsl(std::string_view source) {
  FaultTree tree;
  detail::PositionTable positions;
  std::vector<PendingRef> refs;
  std::optional<SourcePos> top_pos;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(start, end - start);
    start = end + 1;
    ++line_no;

    LineParser p(tokenize(line, line_no), line_no);
    if (p.at_end()) continue;
    const Token& keyword = p.next();
    if (keyword.kind != TokenKind::kIdent ||
        (keyword.text != "top" && keyword.text != "gate" &&
         keyword.text != "basic")) {
      p.fail(ParseErrorCode::kSyntax, keyword,
             "expected 'top', 'gate' or 'basic'");
    }
    const Token id = p.expect_ident("identifier");
    const SourcePos id_pos{line_no, id.column};
    if (tree.contains(id.text)) {
      p.fail(ParseErrorCode::kDuplicateId, id,
             "duplicate definition of '" + id.text + "'");
    }

    if (keyword.text == "basic") {
      const Token& key = p.next();
      if (key.kind != TokenKind::kIdent || key.text != "p") {
        p.fail(ParseErrorCode::kSyntax, key, "expected 'p='");
      }
      p.expect_punct('=');
      const Token number = p.next();
      auto value = detail::parse_double(number.text);
      if (number.kind == TokenKind::kPunct || number.kind == TokenKind::kEnd ||
          !value) {
        p.fail(ParseErrorCode::kBadNumber, number,
               "malformed probability '" + number.text + "'");
      }
      if (!(*value >= 0.0 && *value <= 1.0)) {
        p.fail(ParseErrorCode::kBadNumber, number,
               "probability " + number.text + " outside [0, 1]");
      }
      std::string label = p.finish();
      tree.add_basic(id.text, *value, std::move(label));
      positions.decls[id.text] = id_pos;
      continue;
    }

    if (keyword.text == "top") {
      if (top_pos) {
        p.fail(ParseErrorCode::kSemantic, keyword,
               "second top declaration (first at line " +
                   std::to_string(top_pos->line) + ")");
      }
      top_pos = SourcePos{line_no, keyword.column};
      tree.set_top(id.text);
    }
    p.expect_punct('=');
    const Token gate = p.expect_ident("gate type");
    const std::string type_name = upper(gate.text);
    VertexType type;
    int k = 0;
    if (type_name == "AND") {
      type = VertexType::kAnd;
    } else if (type_name == "OR") {
      type = VertexType::kOr;
    } else if (type_name == "KOFN") {
      type = VertexType::kKofN;
      p.expect_punct('[');
      const Token number = p.next();
      auto value = detail::parse_int(number.text);
      if (!value) {
        p.fail(ParseErrorCode::kBadNumber, number,
               "malformed threshold '" + number.text + "'");
      }
      k = *value;
      p.expect_punct(']');
    } else {
      p.fail(ParseErrorCode::kSyntax, gate,
             "unknown gate type '" + gate.text + "'");
    }
    p.expect_punct('(');
    std::vector<std::string> children;
    if (!p.accept_punct(')')) {
      do {
        const Token& child = p.expect_ident("child identifier");
        const SourcePos child_pos{line_no, child.column};
        refs.push_back({id.text, child.text, child_pos});
        positions.refs.emplace(std::pair(id.text, child.text), child_pos);
        children.push_back(child.text);
      } while (p.accept_punct(','));
      p.expect_punct(')');
    }
    std::string label = p.finish();
    tree.add_gate(id.text, type, std::move(children), k, std::move(label));
    positions.decls[id.text] = id_pos;
  }

  for (const auto& ref : refs) {
    if (!tree.contains(ref.child)) {
      throw ParseError(ParseErrorCode::kUnknownRef, ref.pos.line,
                       ref.pos.column, "undefined reference '" + ref.child + "'");
    }
  }
  if (!top_pos) {
    throw ParseError(ParseErrorCode::kSemantic, 1, 1, "no top declaration");
  }
  detail::check_semantics(tree, positions);
  return tree;
}

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_gate(std::ostringstream& out, const char* keyword, const Vertex& v) {
  out << keyword << ' ' << v.id << " = ";
  switch (v.type) {
    case VertexType::kAnd: out << "AND"; break;
    case VertexType::kOr: out << "OR"; break;
    case VertexType::kKofN: out << "KOFN[" << v.k << ']'; break;
    case VertexType::kBasic: break;
  }
  out << '(';
  for (std::size_t i = 0; i < v.children.size(); ++i) {
    out << (i ? ", " : "") << v.children[i];
  }
  out << ')';
  if (!v.label.empty()) out << " label=" << quote(v.label);
  out << '\n';
}

}  // namespace

std::string serialize_ftdsl(const FaultTree& tree) {
  const auto order = topological_order(tree);
  std::ostringstream out;
  if (const Vertex* top = tree.find(tree.top())) write_gate(out, "top", *top);
  for (const auto& id : order) {
    const Vertex& v = *tree.find(id);
    if (is_gate(v.type) && id != tree.top()) write_gate(out, "gate", v);
  }
  for (const auto& id : order) {
    const Vertex& v = *tree.find(id);
    if (v.type != VertexType::kBasic) continue;
    out << "basic " << v.id << " p=" << format_double(v.prob.value_or(0.0));
    if (!v.label.empty()) out << " label=" << quote(v.label);
    out << '\n';
  }
  return out.str();
}

TreeFormat detect_format(std::string_view source) noexcept {
  for (char c : source) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    if (static_cast<unsigned char>(c) == 0xEF) continue;  // UTF-8 BOM
    if (static_cast<unsigned char>(c) == 0xBB) continue;
    if (static_cast<unsigned char>(c) == 0xBF) continue;
    return c == '<' ? TreeFormat::kOpenPsa : TreeFormat::kFtdsl;
  }
  return TreeFormat::kFtdsl;
}

FaultTree parse_tree(std::string_view source) {
  return detect_format(source) == TreeFormat::kOpenPsa ? parse_openpsa(source)
                                                       : parse_ftdsl(source);
}

FaultTree load_tree(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_tree(buffer.str());
}

}  // namespace ftlab
