#include "ftlab/quant.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "ftlab/error.hpp"
#include "ftlab/tree_index.hpp"

namespace ftlab {

namespace {

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  std::size_t value = 0;
  std::string_view text(raw);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
    return fallback;
  }
  return value;
}

}  // namespace

QuantLimits QuantLimits::from_env() {
  QuantLimits limits;
  limits.node_cap = env_size("FTLAB_NODE_CAP", limits.node_cap);
  limits.cut_set_cap = env_size("FTLAB_CUT_SET_CAP", limits.cut_set_cap);
  return limits;
}

void CutSetCollection::canonicalize() {
  for (auto& s : sets) std::sort(s.begin(), s.end());
  std::sort(sets.begin(), sets.end(), [](const CutSet& a, const CutSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
}

ProbabilityMap basic_probabilities(const FaultTree& tree) {
  ProbabilityMap out;
  for (const auto& [id, v] : tree.vertices()) {
    if (v.type == VertexType::kBasic) out.emplace(id, v.prob.value_or(0.0));
  }
  return out;
}

ProbabilityMap prob_bottom_up(const FaultTree& tree) {
  for (const auto& [id, parents] : tree.parents()) {
    if (parents.size() >= 2) {
      throw Error(ErrorCode::kSharedSubtree,
                  "'" + id + "' has " + std::to_string(parents.size()) +
                      " parents; bottom-up propagation would be inexact");
    }
  }
  ProbabilityMap p;
  for (const auto& id : topological_order(tree)) {
    const Vertex& v = *tree.find(id);
    double value = 0.0;
    switch (v.type) {
      case VertexType::kBasic:
        value = v.prob.value_or(0.0);
        break;
      case VertexType::kAnd:
        value = 1.0;
        for (const auto& c : v.children) value *= p.at(c);
        break;
      case VertexType::kOr: {
        double none = 1.0;
        for (const auto& c : v.children) none *= 1.0 - p.at(c);
        value = 1.0 - none;
        break;
      }
      case VertexType::kKofN: {
        // dist[j]: probability that exactly j children failed so far;
        // dist[k] accumulates "at least k".
        const auto k = static_cast<std::size_t>(std::max(v.k, 0));
        std::vector<double> dist(k + 1, 0.0);
        dist[0] = 1.0;
        for (const auto& c : v.children) {
          if (k == 0) break;
          const double q = p.at(c);
          dist[k] += dist[k - 1] * q;
          for (std::size_t j = k - 1; j >= 1; --j) {
            dist[j] = dist[j] * (1.0 - q) + dist[j - 1] * q;
          }
          dist[0] *= 1.0 - q;
        }
        value = dist[k];
        break;
      }
    }
    p.emplace(id, value);
  }
  return p;
}

std::vector<std::string> variable_order(const FaultTree& tree) {
  std::vector<std::string> order;
  std::unordered_set<std::string_view> seen;
  std::vector<const Vertex*> stack;
  if (const Vertex* top = tree.find(tree.top())) stack.push_back(top);
  // Explicit stack; children pushed in reverse to visit them in order.
  while (!stack.empty()) {
    const Vertex* v = stack.back();
    stack.pop_back();
    if (!seen.insert(v->id).second) continue;
    if (v->type == VertexType::kBasic) {
      order.push_back(v->id);
      continue;
    }
    for (auto it = v->children.rbegin(); it != v->children.rend(); ++it) {
      const Vertex* c = tree.find(*it);
      if (c != nullptr && !seen.contains(c->id)) stack.push_back(c);
    }
  }
  for (const auto& id : tree.basic_events()) {
    if (!seen.contains(id)) order.push_back(id);
  }
  return order;
}

VertexFunctions build_vertex_functions(const FaultTree& tree,
                                       std::size_t node_cap) {
  VertexFunctions out{Bdd(variable_order(tree), node_cap), {}};
  std::unordered_map<std::string_view, std::uint32_t> var_index;
  for (std::uint32_t i = 0; i < out.bdd.order().size(); ++i) {
    var_index.emplace(out.bdd.order()[i], i);
  }
  for (const auto& id : topological_order(tree)) {
    const Vertex& v = *tree.find(id);
    Bdd::Ref ref = Bdd::kFalse;
    std::vector<Bdd::Ref> inputs;
    for (const auto& c : v.children) inputs.push_back(out.roots.at(c));
    switch (v.type) {
      case VertexType::kBasic:
        ref = out.bdd.variable(var_index.at(id));
        break;
      case VertexType::kAnd:
        ref = Bdd::kTrue;
        for (Bdd::Ref r : inputs) ref = out.bdd.conjunction(ref, r);
        break;
      case VertexType::kOr:
        ref = Bdd::kFalse;
        for (Bdd::Ref r : inputs) ref = out.bdd.disjunction(ref, r);
        break;
      case VertexType::kKofN:
        ref = out.bdd.threshold(v.k, inputs);
        break;
    }
    out.roots.emplace(id, ref);
  }
  if (auto it = out.roots.find(tree.top()); it != out.roots.end()) {
    out.bdd.set_root(it->second);
  }
  return out;
}

Bdd build_bdd(const FaultTree& tree, std::size_t node_cap) {
  return std::move(build_vertex_functions(tree, node_cap).bdd);
}

double bdd_probability(const Bdd& bdd, Bdd::Ref root,
                       const ProbabilityMap& probs) {
  std::vector<double> var_prob(bdd.order().size());
  for (std::size_t i = 0; i < var_prob.size(); ++i) {
    auto it = probs.find(bdd.order()[i]);
    if (it == probs.end()) {
      throw Error(ErrorCode::kMissingProbability,
                  "no probability for '" + bdd.order()[i] + "'");
    }
    var_prob[i] = it->second;
  }
  std::unordered_map<Bdd::Ref, double> memo;
  auto eval = [&](auto&& self, Bdd::Ref ref) -> double {
    if (ref == Bdd::kFalse) return 0.0;
    if (ref == Bdd::kTrue) return 1.0;
    if (auto it = memo.find(ref); it != memo.end()) return it->second;
    const Bdd::Node& n = bdd.node(ref);
    const double p = var_prob[n.var];
    const double value = p * self(self, n.high) + (1.0 - p) * self(self, n.low);
    memo.emplace(ref, value);
    return value;
  };
  return eval(eval, root);
}

double bdd_top_probability(const Bdd& bdd, const ProbabilityMap& probs) {
  return bdd_probability(bdd, bdd.root(), probs);
}

ProbabilityMap gate_probabilities(const FaultTree& tree, std::size_t node_cap) {
  const VertexFunctions functions = build_vertex_functions(tree, node_cap);
  const ProbabilityMap probs = basic_probabilities(tree);
  ProbabilityMap out;
  for (const auto& id : tree.gates()) {
    out.emplace(id, bdd_probability(functions.bdd, functions.roots.at(id), probs));
  }
  return out;
}

bool is_cut_set(const FaultTree& tree,
                const std::set<std::string, std::less<>>& candidate) {
  for (const auto& id : candidate) {
    const Vertex* v = tree.find(id);
    if (v == nullptr || v->type != VertexType::kBasic) {
      throw Error(ErrorCode::kUnknownId, "'" + id + "' is not a basic event");
    }
  }
  const TreeIndex index(tree);
  std::vector<char> states(index.basic_count());
  for (std::size_t i = 0; i < states.size(); ++i) {
    states[i] = candidate.contains(index.basic_ids()[i]);
  }
  return index.eval(states);
}

double brute_force_probability(const FaultTree& tree) {
  const TreeIndex index(tree);
  const std::size_t n = index.basic_count();
  if (n > kBruteForceMaxBasic) {
    throw Error(ErrorCode::kTooLarge,
                std::to_string(n) + " basic events exceeds brute-force limit of " +
                    std::to_string(kBruteForceMaxBasic));
  }
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = tree.find(index.basic_ids()[i])->prob.value_or(0.0);
  }
  double total = 0.0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    if (!index.eval(mask)) continue;
    double weight = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      weight *= ((mask >> i) & 1U) ? p[i] : 1.0 - p[i];
    }
    total += weight;
  }
  return total;
}

CutSetCollection brute_force_mcs(const FaultTree& tree) {
  const TreeIndex index(tree);
  const std::size_t n = index.basic_count();
  if (n > kBruteForceMcsMaxBasic) {
    throw Error(ErrorCode::kTooLarge,
                std::to_string(n) + " basic events exceeds brute-force MCS limit of " +
                    std::to_string(kBruteForceMcsMaxBasic));
  }
  const std::size_t count = std::size_t{1} << n;
  std::vector<char> cut(count);
  std::vector<char> covers_cut(count);  // some proper subset is a cut set
  CutSetCollection out;
  for (std::size_t mask = 0; mask < count; ++mask) {
    cut[mask] = index.eval(mask);
    for (std::size_t i = 0; i < n && !covers_cut[mask]; ++i) {
      if ((mask >> i) & 1U) {
        const std::size_t sub = mask & ~(std::size_t{1} << i);
        covers_cut[mask] = cut[sub] || covers_cut[sub];
      }
    }
    if (cut[mask] && !covers_cut[mask]) {
      CutSetCollection::CutSet set;
      for (std::size_t i = 0; i < n; ++i) {
        if ((mask >> i) & 1U) set.push_back(index.basic_ids()[i]);
      }
      out.sets.push_back(std::move(set));
    }
  }
  out.canonicalize();
  return out;
}

ProbabilityBounds mcs_bounds(const CutSetCollection& mcs,
                             const ProbabilityMap& probs) {
  double lower = 0.0;
  double sum = 0.0;
  for (const auto& set : mcs.sets) {
    double product = 1.0;
    for (const auto& id : set) product *= probs.at(id);
    lower = std::max(lower, product);
    sum += product;
  }
  return {lower, std::min(1.0, sum)};
}

}  // namespace ftlab
