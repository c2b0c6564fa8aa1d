#include "ftlab/graph_doc.hpp"

#include "ftlab/error.hpp"

namespace ftlab {

Json export_graph_doc_revealed(const FaultTree& tree,
                               const ProbabilityMap& revealed) {
  const auto order = topological_order(tree);
  Json vertices = Json::array();
  for (const auto& id : order) {
    const Vertex& v = *tree.find(id);
    Json onehot = {0, 0, 0, 0};
    onehot[static_cast<int>(v.type)] = 1;
    double k = 0.0;
    if (v.type == VertexType::kKofN && !v.children.empty()) {
      k = static_cast<double>(v.k) / static_cast<double>(v.children.size());
    }
    Json prob = nullptr;
    if (v.type == VertexType::kBasic) {
      if (v.prob) prob = *v.prob;
    } else if (auto it = revealed.find(id); it != revealed.end()) {
      prob = it->second;
    }
    vertices.push_back({{"id", id},
                        {"kind", to_string(v.type)},
                        {"onehot", std::move(onehot)},
                        {"k", k},
                        {"prob", std::move(prob)}});
  }
  Json edges = Json::array();
  for (const auto& e : tree.edges()) edges.push_back({e.child, e.parent});
  return {{"top", tree.top()},
          {"ordering", order},
          {"vertices", std::move(vertices)},
          {"edges", std::move(edges)}};
}

Json export_graph_doc(const FaultTree& tree, bool mask_gate_probs,
                      const std::optional<ProbabilityMap>& gate_truth) {
  if (mask_gate_probs) return export_graph_doc_revealed(tree, {});
  if (!gate_truth) {
    throw Error(ErrorCode::kMissingTruth,
                "gate probabilities requested but none supplied");
  }
  for (const auto& id : tree.gates()) {
    if (!gate_truth->contains(id)) {
      throw Error(ErrorCode::kMissingTruth, "no probability for gate '" + id + "'");
    }
  }
  return export_graph_doc_revealed(tree, *gate_truth);
}

}  // namespace ftlab
