#include "ftlab/bdd.hpp"

#include <algorithm>
#include <unordered_set>

#include "ftlab/error.hpp"

namespace ftlab {

namespace {

std::size_t mix(std::size_t seed, std::size_t value) noexcept {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::size_t Bdd::TripleHash::operator()(const Node& n) const noexcept {
  return mix(mix(std::hash<std::uint32_t>{}(n.var), n.low), n.high);
}

std::size_t Bdd::IteHash::operator()(const IteKey& k) const noexcept {
  return mix(mix(std::hash<std::uint32_t>{}(k.f), k.g), k.h);
}

Bdd::Bdd(std::vector<std::string> order, std::size_t node_cap)
    : order_(std::move(order)), node_cap_(node_cap) {
  nodes_.push_back({kTerminalVar, kFalse, kFalse});
  nodes_.push_back({kTerminalVar, kTrue, kTrue});
}

Bdd::Ref Bdd::make(std::uint32_t var, Ref low, Ref high) {
  if (low == high) return low;
  const Node key{var, low, high};
  auto it = unique_.find(key);
  if (it != unique_.end()) return it->second;
  if (nodes_.size() >= node_cap_) {
    throw Error(ErrorCode::kCapacityExceeded,
                "BDD node limit of " + std::to_string(node_cap_) + " reached");
  }
  const auto ref = static_cast<Ref>(nodes_.size());
  nodes_.push_back(key);
  unique_.emplace(key, ref);
  return ref;
}

Bdd::Ref Bdd::variable(std::uint32_t index) {
  return make(index, kFalse, kTrue);
}

Bdd::Ref Bdd::cofactor(Ref ref, std::uint32_t var, bool value) const {
  const Node& n = nodes_[ref];
  if (n.var != var) return ref;
  return value ? n.high : n.low;
}

Bdd::Ref Bdd::ite(Ref f, Ref g, Ref h) {
  if (f == kTrue) return g;
  if (f == kFalse) return h;
  if (g == h) return g;
  if (g == kTrue && h == kFalse) return f;

  const IteKey key{f, g, h};
  if (auto it = ite_cache_.find(key); it != ite_cache_.end()) return it->second;

  const std::uint32_t var = std::min({top_var(f), top_var(g), top_var(h)});
  const Ref high =
      ite(cofactor(f, var, true), cofactor(g, var, true), cofactor(h, var, true));
  const Ref low = ite(cofactor(f, var, false), cofactor(g, var, false),
                      cofactor(h, var, false));
  const Ref result = make(var, low, high);
  ite_cache_.emplace(key, result);
  return result;
}

Bdd::Ref Bdd::threshold(int k, std::span<const Ref> inputs) {
  const auto n = static_cast<int>(inputs.size());
  if (k <= 0) return kTrue;
  if (k > n) return kFalse;
  // table[j] holds th(j, i + 1) while row i is being computed, j in [0, k].
  std::vector<Ref> table(static_cast<std::size_t>(k) + 1, kFalse);
  table[0] = kTrue;
  for (int i = n - 1; i >= 0; --i) {
    for (int j = std::min(k, n - i); j >= 1; --j) {
      table[j] = ite(inputs[i], table[j - 1], table[j]);
    }
  }
  return table[k];
}

std::size_t Bdd::size(Ref ref) const {
  std::unordered_set<Ref> seen;
  std::vector<Ref> todo{ref};
  while (!todo.empty()) {
    const Ref r = todo.back();
    todo.pop_back();
    if (is_terminal(r) || !seen.insert(r).second) continue;
    todo.push_back(nodes_[r].low);
    todo.push_back(nodes_[r].high);
  }
  return seen.size();
}

}  // namespace ftlab
