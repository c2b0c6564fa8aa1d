#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftlab/fault_tree.hpp"

namespace ftlab {

/// Integer-indexed view of an acyclic fault tree, vertices laid out in
/// topological order. Used by the evaluation loops that run millions of
/// times (brute-force oracles) where string lookups would dominate.
class TreeIndex {
 public:
  explicit TreeIndex(const FaultTree& tree);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::size_t index_of(std::string_view id) const;
  std::size_t top() const noexcept { return top_; }

  /// Basic events ascending by id; bit/slot i of an assignment refers to
  /// basic_ids()[i].
  const std::vector<std::string>& basic_ids() const noexcept {
    return basic_ids_;
  }
  std::size_t basic_count() const noexcept { return basic_ids_.size(); }

  /// Top value with basic event i failed iff bit i of `mask` is set.
  bool eval(std::uint64_t mask) const;
  bool eval(std::span<const char> basic_states) const;

 private:
  struct Node {
    VertexType type;
    int k;
    std::size_t basic_slot;  // valid for basic events
    std::vector<std::size_t> children;
  };

  template <class StateOf>
  bool run(StateOf&& state_of) const;

  std::vector<std::string> ids_;
  std::vector<Node> nodes_;
  std::vector<std::string> basic_ids_;
  std::size_t top_ = 0;
};

}  // namespace ftlab
