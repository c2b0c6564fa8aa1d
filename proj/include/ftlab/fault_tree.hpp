#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ftlab {

enum class VertexType { kBasic, kAnd, kOr, kKofN };

std::string_view to_string(VertexType type) noexcept;

inline bool is_gate(VertexType type) noexcept {
  return type != VertexType::kBasic;
}

/// A basic event or a gate. Gates own their ordered child list; basic events
/// carry the failure probability. Nothing here is checked on construction so
/// that arbitrary (possibly broken) graphs can be represented and validated.
struct Vertex {
  std::string id;
  VertexType type = VertexType::kBasic;
  int k = 0;                      ///< Threshold of a K-of-N gate, else 0.
  std::optional<double> prob;     ///< Present for basic events.
  std::string label;
  std::vector<std::string> children;

  bool operator==(const Vertex&) const = default;
};

/// Directed edge from a child (cause) to its parent gate.
struct Edge {
  std::string child;
  std::string parent;

  auto operator<=>(const Edge&) const = default;
};

class FaultTree {
 public:
  using VertexMap = std::map<std::string, Vertex, std::less<>>;

  /// Inserts a vertex keyed by its id. Returns false if the id already exists.
  bool add_vertex(Vertex vertex);
  bool add_basic(std::string id, double prob, std::string label = {});
  bool add_gate(std::string id, VertexType type,
                std::vector<std::string> children, int k = 0,
                std::string label = {});
  void set_top(std::string id) { top_ = std::move(id); }

  /// Removes the vertex together with every edge touching it.
  bool remove_vertex(std::string_view id);
  bool remove_edge(std::string_view child, std::string_view parent);

  const VertexMap& vertices() const noexcept { return vertices_; }
  const Vertex* find(std::string_view id) const;
  Vertex* find(std::string_view id);
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  const std::string& top() const noexcept { return top_; }

  /// All (child, parent) pairs, ascending.
  std::vector<Edge> edges() const;
  /// Parents of every vertex, each list ascending.
  std::map<std::string, std::vector<std::string>, std::less<>> parents() const;

  std::vector<std::string> basic_events() const;
  std::vector<std::string> gates() const;
  std::size_t basic_count() const;
  std::size_t gate_count() const;
  std::size_t size() const noexcept { return vertices_.size(); }

  bool operator==(const FaultTree&) const = default;

 private:
  VertexMap vertices_;
  std::string top_;
};

bool is_valid_id(std::string_view id) noexcept;

enum class ViolationCode {
  kBadId,
  kBasicHasChildren,
  kBadProbability,
  kCycle,
  kDuplicateEdge,
  kEmptyGate,
  kKofNArity,
  kKofNRange,
  kMissingProbability,
  kNoBasicEvents,
  kOrphan,
  kProbabilityOnGate,
  kSelfLoop,
  kTopMissing,
  kTopNotGate,
  kUnknownChild,
};

std::string_view to_string(ViolationCode code) noexcept;

struct Violation {
  ViolationCode code;
  std::string locus;  ///< Vertex id, or "child->parent" for edges.
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Checks every fault-tree invariant. Never throws; violations come out
/// sorted by (code, locus).
ValidationReport validate(const FaultTree& tree);

/// Children before parents, ties broken by ascending id. Requires an acyclic
/// graph (orphans are allowed); throws kInvalidTree on a cycle.
std::vector<std::string> topological_order(const FaultTree& tree);

/// Top-event value under `assignment` (basic-event id -> failed). The
/// assignment must cover all basic events exactly.
bool structure_eval(const FaultTree& tree,
                    const std::map<std::string, bool, std::less<>>& assignment);

using AdjacencyMatrix = std::vector<std::vector<int>>;

/// a[m][n] = 1 iff order[m] is a child of order[n]; 2 on the diagonal marks a
/// self-loop, which a valid tree never has.
AdjacencyMatrix adjacency_matrix(const FaultTree& tree,
                                 const std::vector<std::string>& order);

}  // namespace ftlab
