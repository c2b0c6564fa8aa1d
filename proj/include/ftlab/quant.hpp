#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ftlab/bdd.hpp"
#include "ftlab/fault_tree.hpp"
#include "ftlab/graph_doc.hpp"

namespace ftlab {

struct QuantLimits {
  std::size_t node_cap = Bdd::kDefaultNodeCap;
  std::size_t cut_set_cap = 1'000'000;

  /// Defaults overridden by FTLAB_NODE_CAP / FTLAB_CUT_SET_CAP when set.
  static QuantLimits from_env();
};

constexpr std::size_t kBruteForceMaxBasic = 20;
constexpr std::size_t kBruteForceMcsMaxBasic = 16;

/// Minimal cut sets, each sorted ascending; collection ordered by size then
/// lexicographically.
struct CutSetCollection {
  using CutSet = std::vector<std::string>;
  std::vector<CutSet> sets;

  void canonicalize();
  bool operator==(const CutSetCollection&) const = default;
};

ProbabilityMap basic_probabilities(const FaultTree& tree);

/// Bottom-up propagation for trees without sharing. Gives every vertex;
/// throws kSharedSubtree if any vertex has two or more parents.
ProbabilityMap prob_bottom_up(const FaultTree& tree);

/// Depth-first first-visit order of basic events from the top, children in
/// declared order.
std::vector<std::string> variable_order(const FaultTree& tree);

/// One diagram holding the structure function of every vertex.
struct VertexFunctions {
  Bdd bdd;
  std::map<std::string, Bdd::Ref, std::less<>> roots;
};

VertexFunctions build_vertex_functions(const FaultTree& tree,
                                       std::size_t node_cap = Bdd::kDefaultNodeCap);
/// Diagram of the top event; the result's root() is set.
Bdd build_bdd(const FaultTree& tree, std::size_t node_cap = Bdd::kDefaultNodeCap);

double bdd_probability(const Bdd& bdd, Bdd::Ref root, const ProbabilityMap& probs);
double bdd_top_probability(const Bdd& bdd, const ProbabilityMap& probs);

/// Exact probability of every gate, sharing-safe.
ProbabilityMap gate_probabilities(const FaultTree& tree,
                                  std::size_t node_cap = Bdd::kDefaultNodeCap);

CutSetCollection minimal_cut_sets(const FaultTree& tree,
                                  const QuantLimits& limits = {});

bool is_cut_set(const FaultTree& tree, const std::set<std::string, std::less<>>& candidate);

/// Sum over all 2^n assignments; n <= 20 else kTooLarge.
double brute_force_probability(const FaultTree& tree);
/// Subset enumeration; n <= 16 else kTooLarge.
CutSetCollection brute_force_mcs(const FaultTree& tree);

/// Product-of-probabilities bounds from the cut sets of a coherent tree:
/// lower = max over sets, upper = min(1, sum over sets).
struct ProbabilityBounds {
  double lower;
  double upper;
};
ProbabilityBounds mcs_bounds(const CutSetCollection& mcs, const ProbabilityMap& probs);

}  // namespace ftlab
