#include "ftlab/env.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ftlab/error.hpp"

namespace ftlab {

double vertex_reward(double prescribed, double truth, const RewardMode& mode) {
  const double rel =
      std::abs(prescribed - truth) / std::max(truth, mode.eps_rel);
  double reward;
  if (mode.kind == RewardKind::kSymmetric) {
    reward = std::clamp(1.0 - rel, -1.0, 1.0);
  } else if (prescribed <= truth) {
    reward = std::clamp(1.0 - rel, 0.0, 1.0);
  } else {
    reward = -std::min(rel, 1.0);
  }
  // 1 - rel rounds to 1 for rel below half an ulp; full reward stays exact.
  if (reward == 1.0 && prescribed != truth) reward = std::nextafter(1.0, 0.0);
  return reward;
}

Json Observation::to_json() const {
  Json out = {{"graph", graph}, {"steps_remaining", steps_remaining}};
  if (has_query) out["query"] = query ? Json(*query) : Json(nullptr);
  return out;
}

Json StepResult::to_json() const {
  return {{"observation", observation.to_json()},
          {"reward", reward},
          {"done", done},
          {"info", info}};
}

namespace {

void require_valid(const FaultTree& tree) {
  const ValidationReport report = validate(tree);
  if (!report.ok) {
    const Violation& v = report.violations.front();
    throw Error(ErrorCode::kInvalidTree, std::string(to_string(v.code)) + " at '" +
                                             v.locus + "': " + v.message);
  }
}

}  // namespace

Observation VertexQuantEnv::reset(const GenConfig& config, std::uint64_t seed,
                                  const RewardMode& mode) {
  return reset(generate(config, seed), mode);
}

Observation VertexQuantEnv::reset(FaultTree tree, const RewardMode& mode) {
  require_valid(tree);
  if (!(mode.eps_rel > 0.0)) {
    throw Error(ErrorCode::kBadAction, "eps_rel must be positive");
  }
  ProbabilityMap truth = gate_probabilities(tree, node_cap_);
  std::vector<std::string> queries;
  for (const auto& id : topological_order(tree)) {
    if (is_gate(tree.find(id)->type)) queries.push_back(id);
  }
  tree_ = std::move(tree);
  mode_ = mode;
  truth_ = std::move(truth);
  queries_ = std::move(queries);
  revealed_.clear();
  next_ = 0;
  started_ = true;
  return observation();
}

Observation VertexQuantEnv::observation() const {
  Observation obs;
  obs.graph = export_graph_doc_revealed(tree_, revealed_);
  obs.has_query = true;
  if (!done()) obs.query = queries_[next_];
  obs.steps_remaining = static_cast<int>(queries_.size() - std::min(next_, queries_.size()));
  return obs;
}

StepResult VertexQuantEnv::step(double prescribed) {
  if (!started_ || done()) {
    throw Error(ErrorCode::kEpisodeDone, "episode is over; reset first");
  }
  if (!(prescribed >= 0.0 && prescribed <= 1.0)) {
    throw Error(ErrorCode::kBadAction, "prescribed probability must lie in [0, 1]");
  }
  const std::string& query = queries_[next_];
  const double truth = truth_.at(query);
  StepResult result;
  result.reward = vertex_reward(prescribed, truth, mode_);
  revealed_[query] = truth;
  ++next_;
  result.done = done();
  result.info["valid"] = true;
  if (result.done) result.info["ground_truth"] = truth_;
  result.observation = observation();
  return result;
}

CutSetAction CutSetAction::remove_edge(std::string child, std::string parent) {
  CutSetAction a;
  a.kind = Kind::kRemoveEdge;
  a.child = std::move(child);
  a.parent = std::move(parent);
  return a;
}

CutSetAction CutSetAction::remove_vertex(std::string id) {
  CutSetAction a;
  a.kind = Kind::kRemoveVertex;
  a.id = std::move(id);
  return a;
}

CutSetAction CutSetAction::submit() { return {}; }

Observation CutSetEnv::reset(const GenConfig& config, std::uint64_t seed,
                             CutSetTarget /*target*/, std::optional<int> max_steps) {
  return reset(generate(config, seed), max_steps);
}

Observation CutSetEnv::reset(FaultTree tree, std::optional<int> max_steps) {
  require_valid(tree);
  const int steps = max_steps.value_or(4 * static_cast<int>(tree.size()));
  if (steps < 1) throw Error(ErrorCode::kBadAction, "max_steps must be >= 1");
  original_ = tree;
  current_ = std::move(tree);
  steps_remaining_ = steps;
  done_ = false;
  started_ = true;
  return observation();
}

Observation CutSetEnv::observation() const {
  Observation obs;
  obs.graph = export_graph_doc(current_, /*mask_gate_probs=*/true);
  obs.steps_remaining = steps_remaining_;
  return obs;
}

namespace {

std::set<std::string, std::less<>> reachable_from_top(const FaultTree& tree) {
  std::set<std::string, std::less<>> seen;
  const Vertex* top = tree.find(tree.top());
  if (top == nullptr) return seen;
  std::vector<const Vertex*> todo{top};
  seen.insert(top->id);
  while (!todo.empty()) {
    const Vertex* v = todo.back();
    todo.pop_back();
    for (const auto& c : v->children) {
      const Vertex* child = tree.find(c);
      if (child != nullptr && seen.insert(child->id).second) todo.push_back(child);
    }
  }
  return seen;
}

std::vector<std::string> connected_basics(const FaultTree& tree) {
  std::vector<std::string> out;
  for (const auto& id : reachable_from_top(tree)) {
    if (tree.find(id)->type == VertexType::kBasic) out.push_back(id);
  }
  return out;
}

}  // namespace

std::vector<std::string> CutSetEnv::connected_basic_events() const {
  return connected_basics(current_);
}

std::optional<std::string> CutSetEnv::rejection(const FaultTree& candidate) const {
  if (!candidate.contains(candidate.top())) return "would delete the top event";
  for (const auto& [id, v] : candidate.vertices()) {
    if (is_gate(v.type) && v.children.empty()) {
      return "would leave gate '" + id + "' without children";
    }
  }
  if (connected_basics(candidate).empty()) {
    return "would disconnect every basic event from the top";
  }
  return std::nullopt;
}

StepResult CutSetEnv::reject(const std::string& reason) {
  StepResult result;
  result.reward = -1.0;
  result.done = false;
  result.info = {{"valid", false}, {"reason", reason}};
  result.observation = observation();
  return result;
}

Json CutSetEnv::final_ground_truth() const {
  try {
    const CutSetCollection mcs = minimal_cut_sets(original_, limits_);
    return {{"mcs", mcs.sets}};
  } catch (const Error&) {
    return {{"mcs", nullptr}};
  }
}

StepResult CutSetEnv::step(const CutSetAction& action) {
  if (!started_ || done_) {
    throw Error(ErrorCode::kEpisodeDone, "episode is over; reset first");
  }
  StepResult result;
  if (action.kind == CutSetAction::Kind::kSubmit) {
    const std::vector<std::string> remaining = connected_basic_events();
    const std::set<std::string, std::less<>> candidate(remaining.begin(),
                                                       remaining.end());
    const bool valid = is_cut_set(original_, candidate);
    result.reward = valid ? static_cast<double>(original_.basic_count() -
                                                remaining.size())
                          : -1.0;
    done_ = true;
    --steps_remaining_;
    result.info = {{"valid", valid},
                   {"cutset", remaining},
                   {"ground_truth", final_ground_truth()}};
  } else {
    FaultTree candidate = current_;
    if (action.kind == CutSetAction::Kind::kRemoveEdge) {
      if (!candidate.remove_edge(action.child, action.parent)) {
        return reject("no edge " + action.child + "->" + action.parent);
      }
    } else if (!candidate.remove_vertex(action.id)) {
      return reject("no vertex '" + action.id + "'");
    }
    if (auto why = rejection(candidate)) return reject(*why);
    current_ = std::move(candidate);
    --steps_remaining_;
    result.reward = 0.0;
    result.info = {{"valid", true}};
    if (steps_remaining_ <= 0) {
      done_ = true;
      result.info["timeout"] = true;
      result.info["ground_truth"] = final_ground_truth();
    }
  }
  result.done = done_;
  result.observation = observation();
  return result;
}

}  // namespace ftlab
