#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftlab/bdd.hpp"
#include "ftlab/fault_tree.hpp"
#include "ftlab/gen.hpp"
#include "ftlab/graph_doc.hpp"
#include "ftlab/quant.hpp"

namespace ftlab {

enum class RewardKind { kSymmetric, kPaperPessimistic };

struct RewardMode {
  RewardKind kind = RewardKind::kSymmetric;
  double eps_rel = 1e-6;
};

/// rel = |prescribed - truth| / max(truth, eps_rel).
/// Symmetric: clamp(1 - rel, -1, 1).
/// PaperPessimistic: clamp(1 - rel, 0, 1) when prescribed <= truth,
/// otherwise -min(rel, 1).
double vertex_reward(double prescribed, double truth, const RewardMode& mode);

/// What the agent sees. `query` is only used by the vertex environment and
/// is null once the episode is over.
struct Observation {
  Json graph;
  std::optional<std::string> query;
  bool has_query = false;
  int steps_remaining = 0;

  Json to_json() const;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  Json info = Json::object();

  Json to_json() const;
};

/// Vertex-level prescription: the agent is asked for each gate's failure
/// probability in topological order and rewarded by relative error against
/// the exact value. Prescribed gates are revealed afterwards.
class VertexQuantEnv {
 public:
  explicit VertexQuantEnv(std::size_t node_cap = Bdd::kDefaultNodeCap)
      : node_cap_(node_cap) {}

  Observation reset(const GenConfig& config, std::uint64_t seed,
                    const RewardMode& mode = {});
  /// Episode over a given (validated) tree instead of a generated one.
  Observation reset(FaultTree tree, const RewardMode& mode = {});

  /// Throws kEpisodeDone after the last gate; kBadAction unless
  /// 0 <= prescribed <= 1.
  StepResult step(double prescribed);

  Observation observation() const;
  bool done() const noexcept { return next_ >= queries_.size(); }
  bool active() const noexcept { return started_; }
  const FaultTree& tree() const noexcept { return tree_; }
  const ProbabilityMap& ground_truth() const noexcept { return truth_; }
  const std::vector<std::string>& queries() const noexcept { return queries_; }
  const RewardMode& mode() const noexcept { return mode_; }

 private:
  std::size_t node_cap_;
  FaultTree tree_;
  RewardMode mode_;
  ProbabilityMap truth_;
  ProbabilityMap revealed_;
  std::vector<std::string> queries_;
  std::size_t next_ = 0;
  bool started_ = false;
};

struct CutSetAction {
  enum class Kind { kRemoveEdge, kRemoveVertex, kSubmit };

  Kind kind = Kind::kSubmit;
  std::string child;   ///< RemoveEdge
  std::string parent;  ///< RemoveEdge
  std::string id;      ///< RemoveVertex

  static CutSetAction remove_edge(std::string child, std::string parent);
  static CutSetAction remove_vertex(std::string id);
  static CutSetAction submit();
};

enum class CutSetTarget { kAnyCutSet };

/// Graph-level cut-set extraction: the agent prunes edges and vertices and
/// submits; the basic events still connected to the top are scored against
/// the original tree.
class CutSetEnv {
 public:
  explicit CutSetEnv(QuantLimits limits = {}) : limits_(limits) {}

  /// `max_steps` defaults to 4 * |V|.
  Observation reset(const GenConfig& config, std::uint64_t seed,
                    CutSetTarget target = CutSetTarget::kAnyCutSet,
                    std::optional<int> max_steps = {});
  Observation reset(FaultTree tree, std::optional<int> max_steps = {});

  /// Rejected removals return -1 and leave the state (including the step
  /// budget) untouched. Throws kEpisodeDone once finished.
  StepResult step(const CutSetAction& action);

  Observation observation() const;
  bool done() const noexcept { return done_; }
  bool active() const noexcept { return started_; }
  const FaultTree& original() const noexcept { return original_; }
  const FaultTree& current() const noexcept { return current_; }
  /// Basic events with a path to the top in the current graph, ascending.
  std::vector<std::string> connected_basic_events() const;

 private:
  /// Why `candidate` may not replace the current graph, or nullopt if it may.
  std::optional<std::string> rejection(const FaultTree& candidate) const;
  StepResult reject(const std::string& reason);
  Json final_ground_truth() const;

  QuantLimits limits_;
  FaultTree original_;
  FaultTree current_;
  int steps_remaining_ = 0;
  bool done_ = false;
  bool started_ = false;
};

}  // namespace ftlab
