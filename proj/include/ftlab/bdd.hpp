#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ftlab {

/// Reduced ordered binary decision diagram with a shared node store.
///
/// Node 0 is the constant false, node 1 the constant true. Every other node
/// is a (var, low, high) triple with low != high, hash-consed through the
/// unique table, so two functions are equal iff their references are. Nodes
/// are appended after their children, which makes the store index order a
/// topological order of the diagram.
class Bdd {
 public:
  using Ref = std::uint32_t;
  static constexpr Ref kFalse = 0;
  static constexpr Ref kTrue = 1;
  static constexpr std::uint32_t kTerminalVar =
      std::numeric_limits<std::uint32_t>::max();
  static constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 22;

  struct Node {
    std::uint32_t var;
    Ref low;
    Ref high;

    bool operator==(const Node&) const = default;
  };

  explicit Bdd(std::vector<std::string> order,
               std::size_t node_cap = kDefaultNodeCap);

  /// Function of the single variable at `index` in the order.
  Ref variable(std::uint32_t index);
  Ref ite(Ref f, Ref g, Ref h);
  Ref conjunction(Ref f, Ref g) { return ite(f, g, kFalse); }
  Ref disjunction(Ref f, Ref g) { return ite(f, kTrue, g); }

  /// At least `k` of `inputs` true, expanded with the threshold recursion
  /// th(k, i) = ite(inputs[i], th(k - 1, i + 1), th(k, i + 1)).
  Ref threshold(int k, std::span<const Ref> inputs);

  const std::vector<std::string>& order() const noexcept { return order_; }
  const Node& node(Ref ref) const { return nodes_[ref]; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  static bool is_terminal(Ref ref) noexcept { return ref <= kTrue; }

  Ref root() const noexcept { return root_; }
  void set_root(Ref root) noexcept { root_ = root; }

  /// Internal (non-terminal) nodes reachable from `ref`.
  std::size_t size(Ref ref) const;
  std::size_t node_cap() const noexcept { return node_cap_; }

 private:
  struct TripleHash {
    std::size_t operator()(const Node& n) const noexcept;
  };
  struct IteKey {
    Ref f, g, h;
    bool operator==(const IteKey&) const = default;
  };
  struct IteHash {
    std::size_t operator()(const IteKey& k) const noexcept;
  };

  Ref make(std::uint32_t var, Ref low, Ref high);
  std::uint32_t top_var(Ref ref) const { return nodes_[ref].var; }
  Ref cofactor(Ref ref, std::uint32_t var, bool value) const;

  std::vector<std::string> order_;
  std::size_t node_cap_;
  std::vector<Node> nodes_;
  std::unordered_map<Node, Ref, TripleHash> unique_;
  std::unordered_map<IteKey, Ref, IteHash> ite_cache_;
  Ref root_ = kFalse;
};

}  // namespace ftlab
