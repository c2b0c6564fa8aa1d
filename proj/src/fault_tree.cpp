#include "ftlab/fault_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <unordered_map>

#include "ftlab/error.hpp"
#include "ftlab/tree_index.hpp"

namespace ftlab {

std::string_view to_string(VertexType type) noexcept {
  switch (type) {
    case VertexType::kBasic: return "basic";
    case VertexType::kAnd: return "and";
    case VertexType::kOr: return "or";
    case VertexType::kKofN: return "kofn";
  }
  return "unknown";
}

std::string_view to_string(ViolationCode code) noexcept {
  switch (code) {
    case ViolationCode::kBadId: return "BAD_ID";
    case ViolationCode::kBasicHasChildren: return "BASIC_HAS_CHILDREN";
    case ViolationCode::kBadProbability: return "BAD_PROBABILITY";
    case ViolationCode::kCycle: return "CYCLE";
    case ViolationCode::kDuplicateEdge: return "DUPLICATE_EDGE";
    case ViolationCode::kEmptyGate: return "EMPTY_GATE";
    case ViolationCode::kKofNArity: return "KOFN_ARITY";
    case ViolationCode::kKofNRange: return "KOFN_RANGE";
    case ViolationCode::kMissingProbability: return "MISSING_PROBABILITY";
    case ViolationCode::kNoBasicEvents: return "NO_BASIC_EVENTS";
    case ViolationCode::kOrphan: return "ORPHAN";
    case ViolationCode::kProbabilityOnGate: return "PROBABILITY_ON_GATE";
    case ViolationCode::kSelfLoop: return "SELF_LOOP";
    case ViolationCode::kTopMissing: return "TOP_MISSING";
    case ViolationCode::kTopNotGate: return "TOP_NOT_GATE";
    case ViolationCode::kUnknownChild: return "UNKNOWN_CHILD";
  }
  return "UNKNOWN";
}

bool is_valid_id(std::string_view id) noexcept {
  if (id.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!alpha(id.front())) return false;
  return std::all_of(id.begin() + 1, id.end(), [&](char c) {
    return alpha(c) || (c >= '0' && c <= '9');
  });
}

bool FaultTree::add_vertex(Vertex vertex) {
  std::string key = vertex.id;
  return vertices_.emplace(std::move(key), std::move(vertex)).second;
}

bool FaultTree::add_basic(std::string id, double prob, std::string label) {
  Vertex v;
  v.id = std::move(id);
  v.type = VertexType::kBasic;
  v.prob = prob;
  v.label = std::move(label);
  return add_vertex(std::move(v));
}

bool FaultTree::add_gate(std::string id, VertexType type,
                         std::vector<std::string> children, int k,
                         std::string label) {
  Vertex v;
  v.id = std::move(id);
  v.type = type;
  v.k = type == VertexType::kKofN ? k : 0;
  v.children = std::move(children);
  v.label = std::move(label);
  return add_vertex(std::move(v));
}

bool FaultTree::remove_vertex(std::string_view id) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) return false;
  vertices_.erase(it);
  for (auto& [key, v] : vertices_) {
    std::erase(v.children, id);
  }
  return true;
}

bool FaultTree::remove_edge(std::string_view child, std::string_view parent) {
  Vertex* p = find(parent);
  if (p == nullptr) return false;
  auto it = std::find(p->children.begin(), p->children.end(), child);
  if (it == p->children.end()) return false;
  p->children.erase(it);
  return true;
}

const Vertex* FaultTree::find(std::string_view id) const {
  auto it = vertices_.find(id);
  return it == vertices_.end() ? nullptr : &it->second;
}

Vertex* FaultTree::find(std::string_view id) {
  auto it = vertices_.find(id);
  return it == vertices_.end() ? nullptr : &it->second;
}

std::vector<Edge> FaultTree::edges() const {
  std::set<Edge> unique;
  for (const auto& [id, v] : vertices_) {
    for (const auto& c : v.children) unique.insert({c, id});
  }
  return {unique.begin(), unique.end()};
}

std::map<std::string, std::vector<std::string>, std::less<>>
FaultTree::parents() const {
  std::map<std::string, std::vector<std::string>, std::less<>> out;
  for (const auto& [id, v] : vertices_) out[id];
  for (const auto& [id, v] : vertices_) {
    for (const auto& c : v.children) {
      auto& list = out[c];
      if (list.empty() || list.back() != id) list.push_back(id);
    }
  }
  return out;
}

std::vector<std::string> FaultTree::basic_events() const {
  std::vector<std::string> out;
  for (const auto& [id, v] : vertices_) {
    if (v.type == VertexType::kBasic) out.push_back(id);
  }
  return out;
}

std::vector<std::string> FaultTree::gates() const {
  std::vector<std::string> out;
  for (const auto& [id, v] : vertices_) {
    if (is_gate(v.type)) out.push_back(id);
  }
  return out;
}

std::size_t FaultTree::basic_count() const {
  return static_cast<std::size_t>(
      std::count_if(vertices_.begin(), vertices_.end(), [](const auto& kv) {
        return kv.second.type == VertexType::kBasic;
      }));
}

std::size_t FaultTree::gate_count() const { return size() - basic_count(); }

namespace {

/// Tarjan's strongly connected components over the child relation; returns
/// the components with more than one vertex.
std::vector<std::vector<std::string>> cyclic_components(const FaultTree& tree) {
  std::unordered_map<std::string_view, int> index;
  std::unordered_map<std::string_view, int> low;
  std::unordered_map<std::string_view, bool> on_stack;
  std::vector<std::string_view> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;

  std::function<void(const Vertex&)> connect = [&](const Vertex& v) {
    index[v.id] = low[v.id] = counter++;
    stack.push_back(v.id);
    on_stack[v.id] = true;
    for (const auto& cid : v.children) {
      const Vertex* c = tree.find(cid);
      if (c == nullptr) continue;
      if (!index.contains(c->id)) {
        connect(*c);
        low[v.id] = std::min(low[v.id], low[c->id]);
      } else if (on_stack[c->id]) {
        low[v.id] = std::min(low[v.id], index[c->id]);
      }
    }
    if (low[v.id] == index[v.id]) {
      std::vector<std::string> component;
      std::string_view w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component.emplace_back(w);
      } while (w != v.id);
      if (component.size() > 1) {
        std::sort(component.begin(), component.end());
        out.push_back(std::move(component));
      }
    }
  };

  for (const auto& [id, v] : tree.vertices()) {
    if (!index.contains(v.id)) connect(v);
  }
  return out;
}

}  // namespace

ValidationReport validate(const FaultTree& tree) {
  ValidationReport report;
  auto flag = [&](ViolationCode code, std::string locus, std::string message) {
    report.violations.push_back({code, std::move(locus), std::move(message)});
  };

  std::size_t basics = 0;
  for (const auto& [id, v] : tree.vertices()) {
    if (!is_valid_id(id)) flag(ViolationCode::kBadId, id, "malformed id");
    if (v.type == VertexType::kBasic) {
      ++basics;
      if (!v.children.empty()) {
        flag(ViolationCode::kBasicHasChildren, id,
             "basic event has children");
      }
      if (!v.prob) {
        flag(ViolationCode::kMissingProbability, id,
             "basic event without probability");
      } else if (!(*v.prob >= 0.0 && *v.prob <= 1.0)) {
        flag(ViolationCode::kBadProbability, id,
             "probability outside [0, 1]");
      }
      continue;
    }
    if (v.prob) {
      flag(ViolationCode::kProbabilityOnGate, id, "gate carries probability");
    }
    if (v.children.empty()) {
      flag(ViolationCode::kEmptyGate, id, "gate has no children");
    }
    if (v.type == VertexType::kKofN) {
      const auto n = static_cast<int>(v.children.size());
      if (n < 2) {
        flag(ViolationCode::kKofNArity, id, "k-of-n gate needs >= 2 children");
      }
      if (v.k < 1 || v.k > n) {
        flag(ViolationCode::kKofNRange, id,
             "k = " + std::to_string(v.k) + " outside [1, " +
                 std::to_string(n) + "]");
      }
    }
    std::set<std::string_view> seen;
    for (const auto& c : v.children) {
      const std::string locus = c + "->" + id;
      if (c == id) {
        flag(ViolationCode::kSelfLoop, locus, "self-loop");
      } else if (!tree.contains(c)) {
        flag(ViolationCode::kUnknownChild, locus, "unknown child '" + c + "'");
      }
      if (!seen.insert(c).second) {
        flag(ViolationCode::kDuplicateEdge, locus, "parallel edge");
      }
    }
  }
  if (basics == 0) flag(ViolationCode::kNoBasicEvents, "", "no basic events");

  for (const auto& component : cyclic_components(tree)) {
    std::string members;
    for (const auto& m : component) members += (members.empty() ? "" : ",") + m;
    flag(ViolationCode::kCycle, component.front(), "cycle through " + members);
  }

  const Vertex* top = tree.find(tree.top());
  if (top == nullptr) {
    flag(ViolationCode::kTopMissing, tree.top(), "top event not defined");
  } else {
    if (!is_gate(top->type)) {
      flag(ViolationCode::kTopNotGate, top->id, "top event is not a gate");
    }
    std::set<std::string_view> reached;
    std::vector<const Vertex*> todo{top};
    reached.insert(top->id);
    while (!todo.empty()) {
      const Vertex* v = todo.back();
      todo.pop_back();
      for (const auto& cid : v->children) {
        const Vertex* c = tree.find(cid);
        if (c != nullptr && reached.insert(c->id).second) todo.push_back(c);
      }
    }
    for (const auto& [id, v] : tree.vertices()) {
      if (!reached.contains(id)) {
        flag(ViolationCode::kOrphan, id, "not on any path to the top event");
      }
    }
  }

  std::sort(report.violations.begin(), report.violations.end(),
            [](const Violation& a, const Violation& b) {
              return std::pair(a.code, std::string_view(a.locus)) <
                     std::pair(b.code, std::string_view(b.locus));
            });
  report.ok = report.violations.empty();
  return report;
}

std::vector<std::string> topological_order(const FaultTree& tree) {
  std::map<std::string_view, std::size_t, std::less<>> pending;
  std::map<std::string_view, std::vector<std::string_view>, std::less<>> ups;
  for (const auto& [id, v] : tree.vertices()) {
    std::set<std::string_view> kids;
    for (const auto& c : v.children) {
      if (tree.contains(c)) kids.insert(c);
    }
    pending[id] = kids.size();
    for (auto c : kids) ups[c].push_back(id);
  }
  std::priority_queue<std::string_view, std::vector<std::string_view>,
                      std::greater<>>
      ready;
  for (const auto& [id, n] : pending) {
    if (n == 0) ready.push(id);
  }
  std::vector<std::string> order;
  order.reserve(tree.size());
  while (!ready.empty()) {
    auto id = ready.top();
    ready.pop();
    order.emplace_back(id);
    for (auto p : ups[id]) {
      if (--pending[p] == 0) ready.push(p);
    }
  }
  if (order.size() != tree.size()) {
    throw Error(ErrorCode::kInvalidTree, "graph contains a cycle");
  }
  return order;
}

bool structure_eval(const FaultTree& tree,
                    const std::map<std::string, bool, std::less<>>& assignment) {
  for (const auto& [id, value] : assignment) {
    const Vertex* v = tree.find(id);
    if (v == nullptr || v->type != VertexType::kBasic) {
      throw Error(ErrorCode::kUnknownId, "'" + id + "' is not a basic event");
    }
  }
  TreeIndex index(tree);
  std::vector<char> states(index.basic_count());
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto it = assignment.find(index.basic_ids()[i]);
    if (it == assignment.end()) {
      throw Error(ErrorCode::kMissingAssignment,
                  "no value for '" + index.basic_ids()[i] + "'");
    }
    states[i] = it->second;
  }
  return index.eval(states);
}

AdjacencyMatrix adjacency_matrix(const FaultTree& tree,
                                 const std::vector<std::string>& order) {
  std::map<std::string_view, std::size_t, std::less<>> position;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!tree.contains(order[i]) || !position.emplace(order[i], i).second) {
      throw Error(ErrorCode::kBadOrder,
                  "order is not a permutation of the vertices");
    }
  }
  if (position.size() != tree.size()) {
    throw Error(ErrorCode::kBadOrder,
                "order is not a permutation of the vertices");
  }
  AdjacencyMatrix a(order.size(), std::vector<int>(order.size(), 0));
  for (const auto& [id, v] : tree.vertices()) {
    const std::size_t n = position.at(id);
    for (const auto& c : v.children) {
      auto it = position.find(c);
      if (it == position.end()) continue;
      a[it->second][n] = it->second == n ? 2 : 1;
    }
  }
  return a;
}

}  // namespace ftlab
