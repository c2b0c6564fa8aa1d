#include "ftlab/tree_index.hpp"

#include <algorithm>
#include <map>

#include "ftlab/error.hpp"

namespace ftlab {

TreeIndex::TreeIndex(const FaultTree& tree) : ids_(topological_order(tree)) {
  std::map<std::string_view, std::size_t, std::less<>> position;
  for (std::size_t i = 0; i < ids_.size(); ++i) position[ids_[i]] = i;
  basic_ids_ = tree.basic_events();
  std::map<std::string_view, std::size_t, std::less<>> slot;
  for (std::size_t i = 0; i < basic_ids_.size(); ++i) slot[basic_ids_[i]] = i;

  nodes_.reserve(ids_.size());
  for (const auto& id : ids_) {
    const Vertex& v = *tree.find(id);
    Node node{v.type, v.k, 0, {}};
    if (v.type == VertexType::kBasic) node.basic_slot = slot.at(id);
    for (const auto& c : v.children) {
      auto it = position.find(c);
      if (it == position.end()) {
        throw Error(ErrorCode::kInvalidTree, "unknown child '" + c + "'");
      }
      node.children.push_back(it->second);
    }
    nodes_.push_back(std::move(node));
  }
  auto it = position.find(tree.top());
  if (it == position.end()) {
    throw Error(ErrorCode::kInvalidTree, "top event not defined");
  }
  top_ = it->second;
}

std::size_t TreeIndex::index_of(std::string_view id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) {
    throw Error(ErrorCode::kUnknownId, "unknown vertex '" + std::string(id) + "'");
  }
  return static_cast<std::size_t>(it - ids_.begin());
}

template <class StateOf>
bool TreeIndex::run(StateOf&& state_of) const {
  std::vector<char> value(nodes_.size(), 0);
  for (std::size_t i = 0; i <= top_; ++i) {
    const Node& node = nodes_[i];
    switch (node.type) {
      case VertexType::kBasic:
        value[i] = state_of(node.basic_slot);
        break;
      case VertexType::kAnd:
        value[i] = std::all_of(node.children.begin(), node.children.end(),
                               [&](std::size_t c) { return value[c] != 0; });
        break;
      case VertexType::kOr:
        value[i] = std::any_of(node.children.begin(), node.children.end(),
                               [&](std::size_t c) { return value[c] != 0; });
        break;
      case VertexType::kKofN: {
        const auto failed =
            std::count_if(node.children.begin(), node.children.end(),
                          [&](std::size_t c) { return value[c] != 0; });
        value[i] = failed >= node.k;
        break;
      }
    }
  }
  return value[top_] != 0;
}

bool TreeIndex::eval(std::uint64_t mask) const {
  return run([mask](std::size_t slot) -> char { return (mask >> slot) & 1U; });
}

bool TreeIndex::eval(std::span<const char> basic_states) const {
  return run([basic_states](std::size_t slot) -> char {
    return basic_states[slot] != 0;
  });
}

}  // namespace ftlab
