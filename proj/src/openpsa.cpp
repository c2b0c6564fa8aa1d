#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "ftlab/parse.hpp"
#include "parse_support.hpp"
#include "xml.hpp"

namespace ftlab {

namespace {

using detail::SourcePos;
using detail::XmlElement;

// Open-PSA MEF constructs outside the supported subset. Anything listed here
// is rejected with kUnsupported; unknown names are plain syntax errors.
constexpr std::array kUnsupportedElements = {
    "not", "xor", "nand", "nor", "iff", "imply", "cardinality", "null",
    "constant", "house-event", "define-house-event", "define-parameter",
    "parameter", "define-CCF-group", "define-component", "define-event-tree",
    "define-initiating-event", "define-sequence", "define-rule",
    "define-substitution", "define-alignment", "define-extern-function",
    "attributes", "priority-and", "pand", "por", "spare", "fdep", "seq",
    "inhibit", "int", "bool", "exponential", "GLM", "Weibull",
    "periodic-test", "uniform-deviate", "normal-deviate", "lognormal-deviate",
    "gamma-deviate", "beta-deviate", "histogram", "system-mission-time",
    "mul", "add", "sub", "div", "neg", "pi", "test-initiating-event",
    "test-functional-event", "ite", "switch", "min", "max", "mean", "pow",
    "exp", "log", "log10", "sqrt", "abs"};

bool unsupported(std::string_view name) {
  return std::find(kUnsupportedElements.begin(), kUnsupportedElements.end(),
                   name) != kUnsupportedElements.end();
}

[[noreturn]] void fail(ParseErrorCode code, const XmlElement& at,
                       const std::string& message) {
  throw ParseError(code, at.pos.line, at.pos.column, message);
}

[[noreturn]] void reject(const XmlElement& el) {
  if (unsupported(el.name)) {
    fail(ParseErrorCode::kUnsupported, el,
         "<" + el.name + "> is not supported");
  }
  fail(ParseErrorCode::kSyntax, el, "unexpected element <" + el.name + ">");
}

const std::string& required(const XmlElement& el, std::string_view key) {
  const std::string* value = el.attribute(key);
  if (value == nullptr) {
    fail(ParseErrorCode::kSyntax, el,
         "<" + el.name + "> requires attribute '" + std::string(key) + "'");
  }
  return *value;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

enum class RefKind { kGate, kBasic, kAny };

struct Ref {
  std::string parent;
  std::string child;
  RefKind kind;
  SourcePos pos;
};

class OpenPsaBuilder {
 public:
  FaultTree build(const XmlElement& root) {
    if (root.name != "opsa-mef") {
      fail(ParseErrorCode::kSyntax, root, "root element must be <opsa-mef>");
    }
    for (const auto& child : root.children) {
      if (child.name == "define-fault-tree") {
        fault_tree(child);
      } else if (child.name == "model-data") {
        model_data(child);
      } else if (child.name == "label") {
        continue;
      } else {
        reject(child);
      }
    }
    return finish(root);
  }

 private:
  void declare(const XmlElement& el, const std::string& id) {
    if (tree_.contains(id)) {
      fail(ParseErrorCode::kDuplicateId, el,
           "duplicate definition of '" + id + "'");
    }
    positions_.decls[id] = el.pos;
  }

  void fault_tree(const XmlElement& el) {
    required(el, "name");
    for (const auto& child : el.children) {
      if (child.name == "define-gate") gate(child);
      else if (child.name == "define-basic-event") basic_event(child);
      else if (child.name == "label") continue;
      else reject(child);
    }
  }

  void model_data(const XmlElement& el) {
    for (const auto& child : el.children) {
      if (child.name == "define-basic-event") basic_event(child);
      else reject(child);
    }
  }

  void gate(const XmlElement& el) {
    const std::string& id = required(el, "name");
    declare(el, id);
    std::string label;
    const XmlElement* formula = nullptr;
    for (const auto& child : el.children) {
      if (child.name == "label") {
        label = trim(child.text);
      } else if (formula != nullptr) {
        fail(ParseErrorCode::kSyntax, child,
             "gate '" + id + "' has more than one formula");
      } else {
        formula = &child;
      }
    }
    if (formula == nullptr) {
      fail(ParseErrorCode::kSyntax, el, "gate '" + id + "' has no formula");
    }
    VertexType type;
    int k = 0;
    if (formula->name == "and") {
      type = VertexType::kAnd;
    } else if (formula->name == "or") {
      type = VertexType::kOr;
    } else if (formula->name == "atleast") {
      type = VertexType::kKofN;
      const std::string& min = required(*formula, "min");
      auto value = detail::parse_int(min);
      if (!value) {
        fail(ParseErrorCode::kBadNumber, *formula,
             "malformed min='" + min + "'");
      }
      k = *value;
    } else {
      reject(*formula);
    }
    std::vector<std::string> children;
    for (const auto& arg : formula->children) {
      RefKind kind;
      if (arg.name == "gate") kind = RefKind::kGate;
      else if (arg.name == "basic-event") kind = RefKind::kBasic;
      else if (arg.name == "event") kind = RefKind::kAny;
      else if (arg.name == "and" || arg.name == "or" || arg.name == "atleast") {
        fail(ParseErrorCode::kUnsupported, arg,
             "nested formulas are not supported; define a named gate");
      } else {
        reject(arg);
      }
      const std::string& child = required(arg, "name");
      refs_.push_back({id, child, kind, arg.pos});
      positions_.refs.emplace(std::pair(id, child), arg.pos);
      children.push_back(child);
    }
    tree_.add_gate(id, type, std::move(children), k, std::move(label));
  }

  void basic_event(const XmlElement& el) {
    const std::string& id = required(el, "name");
    declare(el, id);
    std::string label;
    std::optional<double> prob;
    for (const auto& child : el.children) {
      if (child.name == "label") {
        label = trim(child.text);
      } else if (child.name == "float") {
        if (prob) {
          fail(ParseErrorCode::kSyntax, child,
               "basic event '" + id + "' has more than one expression");
        }
        const std::string& text = required(child, "value");
        prob = detail::parse_double(trim(text));
        if (!prob) {
          fail(ParseErrorCode::kBadNumber, child,
               "malformed probability '" + text + "'");
        }
        if (!(*prob >= 0.0 && *prob <= 1.0)) {
          fail(ParseErrorCode::kBadNumber, child,
               "probability " + text + " outside [0, 1]");
        }
      } else {
        reject(child);
      }
    }
    if (!prob) {
      fail(ParseErrorCode::kSemantic, el,
           "basic event '" + id + "' has no constant probability");
    }
    tree_.add_basic(id, *prob, std::move(label));
  }

  FaultTree finish(const XmlElement& root) {
    std::set<std::string> referenced;
    for (const auto& ref : refs_) {
      const Vertex* v = tree_.find(ref.child);
      if (v == nullptr) {
        throw ParseError(ParseErrorCode::kUnknownRef, ref.pos.line,
                         ref.pos.column,
                         "undefined reference '" + ref.child + "'");
      }
      if ((ref.kind == RefKind::kGate && !is_gate(v->type)) ||
          (ref.kind == RefKind::kBasic && is_gate(v->type))) {
        throw ParseError(ParseErrorCode::kSemantic, ref.pos.line,
                         ref.pos.column,
                         "'" + ref.child + "' referenced with the wrong kind");
      }
      referenced.insert(ref.child);
    }
    std::vector<std::string> roots;
    for (const auto& id : tree_.gates()) {
      if (!referenced.contains(id)) roots.push_back(id);
    }
    if (roots.size() != 1) {
      const XmlElement* at = &root;
      std::string message = roots.empty()
                                ? "no top gate (every gate is referenced)"
                                : "multiple top gate candidates:";
      for (const auto& r : roots) message += " " + r;
      const SourcePos pos =
          roots.size() > 1 ? positions_.decls.at(roots[1]) : at->pos;
      throw ParseError(ParseErrorCode::kSemantic, pos.line, pos.column,
                       message);
    }
    tree_.set_top(roots.front());
    detail::check_semantics(tree_, positions_);
    return std::move(tree_);
  }

  FaultTree tree_;
  detail::PositionTable positions_;
  std::vector<Ref> refs_;
};

}  // namespace

FaultTree parse_openpsa(std::string_view source) {
  return OpenPsaBuilder().build(detail::parse_xml(source));
}

std::string serialize_openpsa(const FaultTree& tree, std::string_view name) {
  using detail::xml_escape;
  const auto order = topological_order(tree);
  std::vector<const Vertex*> gates;
  if (const Vertex* top = tree.find(tree.top())) gates.push_back(top);
  for (const auto& id : order) {
    const Vertex* v = tree.find(id);
    if (is_gate(v->type) && id != tree.top()) gates.push_back(v);
  }

  std::ostringstream out;
  out << "<?xml version=\"1.0\"?>\n<opsa-mef>\n";
  out << "  <define-fault-tree name=\"" << xml_escape(name) << "\">\n";
  for (const Vertex* g : gates) {
    out << "    <define-gate name=\"" << g->id << "\">\n";
    if (!g->label.empty()) {
      out << "      <label>" << xml_escape(g->label) << "</label>\n";
    }
    switch (g->type) {
      case VertexType::kAnd: out << "      <and>\n"; break;
      case VertexType::kOr: out << "      <or>\n"; break;
      default: out << "      <atleast min=\"" << g->k << "\">\n"; break;
    }
    for (const auto& c : g->children) {
      const Vertex* child = tree.find(c);
      const bool gate = child != nullptr && is_gate(child->type);
      out << "        <" << (gate ? "gate" : "basic-event") << " name=\"" << c
          << "\"/>\n";
    }
    switch (g->type) {
      case VertexType::kAnd: out << "      </and>\n"; break;
      case VertexType::kOr: out << "      </or>\n"; break;
      default: out << "      </atleast>\n"; break;
    }
    out << "    </define-gate>\n";
  }
  for (const auto& id : order) {
    const Vertex* v = tree.find(id);
    if (v->type != VertexType::kBasic) continue;
    out << "    <define-basic-event name=\"" << v->id << "\">\n";
    if (!v->label.empty()) {
      out << "      <label>" << xml_escape(v->label) << "</label>\n";
    }
    out << "      <float value=\"" << format_double(v->prob.value_or(0.0))
        << "\"/>\n";
    out << "    </define-basic-event>\n";
  }
  out << "  </define-fault-tree>\n</opsa-mef>\n";
  return out.str();
}

}  // namespace ftlab
