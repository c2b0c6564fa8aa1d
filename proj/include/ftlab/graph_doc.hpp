#pragma once

#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "ftlab/fault_tree.hpp"

namespace ftlab {

using Json = nlohmann::json;
using ProbabilityMap = std::map<std::string, double, std::less<>>;

/// Graph document consumed by learning clients:
///
///   {"top": id, "ordering": [ids in topological order],
///    "vertices": [{"id", "kind", "onehot": [basic, and, or, kofn],
///                  "k": k/n or 0, "prob": value or null}, ...],
///    "edges": [[child, parent], ...]}
///
/// With mask_gate_probs every gate's prob is null; otherwise gate_truth
/// must supply a value for every gate (kMissingTruth).
Json export_graph_doc(const FaultTree& tree, bool mask_gate_probs,
                      const std::optional<ProbabilityMap>& gate_truth = {});

/// Same layout, gates shown only if present in `revealed`. Accepts any
/// acyclic graph, including partially dismantled trees.
Json export_graph_doc_revealed(const FaultTree& tree,
                               const ProbabilityMap& revealed);

}  // namespace ftlab
