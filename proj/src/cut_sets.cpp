// Minimal cut sets from the BDD of a coherent structure function.
//
// Solutions are collected in a zero-suppressed diagram: a node (v, low, high)
// stands for the family low ∪ {S ∪ {v} : S ∈ high}, terminal 0 is the empty
// family and terminal 1 the family holding only the empty set. For a BDD node
// f = ite(v, f1, f0) of a monotone function the minimal solutions are
//
//   minsol(f) = (v, minsol(f0), minsol(f1) \ minsol(f0))
//
// where K \ L drops every set of K that contains some set of L.

#include <cstdio>
#include <limits>
#include <unordered_map>

#include "ftlab/error.hpp"
#include "ftlab/quant.hpp"

namespace ftlab {

namespace {

class SetFamilies {
 public:
  using Ref = std::uint32_t;
  static constexpr Ref kEmpty = 0;
  static constexpr Ref kBase = 1;

  SetFamilies(const Bdd& bdd, std::size_t node_cap)
      : bdd_(bdd), node_cap_(node_cap) {
    nodes_.push_back({Bdd::kTerminalVar, kEmpty, kEmpty});
    nodes_.push_back({Bdd::kTerminalVar, kBase, kBase});
  }

  Ref minimal_solutions(Bdd::Ref f) {
    if (f == Bdd::kFalse) return kEmpty;
    if (f == Bdd::kTrue) return kBase;
    if (auto it = minsol_.find(f); it != minsol_.end()) return it->second;
    const Bdd::Node& n = bdd_.node(f);
    const Ref without_var = minimal_solutions(n.low);
    const Ref with_var = without(minimal_solutions(n.high), without_var);
    const Ref result = make(n.var, without_var, with_var);
    minsol_.emplace(f, result);
    return result;
  }

  double count(Ref z) {
    if (z == kEmpty) return 0.0;
    if (z == kBase) return 1.0;
    if (auto it = counts_.find(z); it != counts_.end()) return it->second;
    const double c = count(nodes_[z].low) + count(nodes_[z].high);
    counts_.emplace(z, c);
    return c;
  }

  void enumerate(Ref z, std::vector<std::uint32_t>& prefix,
                 std::vector<std::vector<std::uint32_t>>& out) const {
    if (z == kEmpty) return;
    if (z == kBase) {
      out.push_back(prefix);
      return;
    }
    const Bdd::Node& n = nodes_[z];
    enumerate(n.low, prefix, out);
    prefix.push_back(n.var);
    enumerate(n.high, prefix, out);
    prefix.pop_back();
  }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<Ref, Ref>& p) const noexcept {
      return (static_cast<std::size_t>(p.first) << 32) ^ p.second;
    }
  };
  struct TripleHash {
    std::size_t operator()(const Bdd::Node& n) const noexcept {
      std::size_t h = n.var;
      h = h * 0x100000001b3ULL ^ n.low;
      h = h * 0x100000001b3ULL ^ n.high;
      return h;
    }
  };

  Ref make(std::uint32_t var, Ref low, Ref high) {
    if (high == kEmpty) return low;
    const Bdd::Node key{var, low, high};
    if (auto it = unique_.find(key); it != unique_.end()) return it->second;
    if (nodes_.size() >= node_cap_) {
      throw Error(ErrorCode::kCapacityExceeded,
                  "cut-set diagram node limit of " + std::to_string(node_cap_) +
                      " reached");
    }
    const auto ref = static_cast<Ref>(nodes_.size());
    nodes_.push_back(key);
    unique_.emplace(key, ref);
    return ref;
  }

  bool holds_empty_set(Ref z) const {
    while (z > kBase) z = nodes_[z].low;
    return z == kBase;
  }

  Ref without(Ref k, Ref l) {
    if (k == kEmpty || l == kEmpty) return k;
    if (holds_empty_set(l)) return kEmpty;
    if (k == kBase) return kBase;
    const std::pair key{k, l};
    if (auto it = without_.find(key); it != without_.end()) return it->second;

    const Bdd::Node kn = nodes_[k];
    const Bdd::Node ln = nodes_[l];
    Ref result;
    if (kn.var < ln.var) {
      result = make(kn.var, without(kn.low, l), without(kn.high, l));
    } else if (ln.var < kn.var) {
      result = without(k, ln.low);
    } else {
      const Ref low = without(kn.low, ln.low);
      const Ref high = without(without(kn.high, ln.low), ln.high);
      result = make(kn.var, low, high);
    }
    without_.emplace(key, result);
    return result;
  }

  const Bdd& bdd_;
  std::size_t node_cap_;
  std::vector<Bdd::Node> nodes_;
  std::unordered_map<Bdd::Node, Ref, TripleHash> unique_;
  std::unordered_map<Bdd::Ref, Ref> minsol_;
  std::unordered_map<std::pair<Ref, Ref>, Ref, PairHash> without_;
  std::unordered_map<Ref, double> counts_;
};

}  // namespace

CutSetCollection minimal_cut_sets(const FaultTree& tree,
                                  const QuantLimits& limits) {
  const Bdd bdd = build_bdd(tree, limits.node_cap);
  SetFamilies families(bdd, limits.node_cap);
  const auto solutions = families.minimal_solutions(bdd.root());
  const double total = families.count(solutions);
  if (total > static_cast<double>(limits.cut_set_cap)) {
    char count[32];
    std::snprintf(count, sizeof(count), "%.0f", total);
    throw Error(ErrorCode::kCutSetLimit,
                std::string("tree has ") + count + " minimal cut sets, cap is " +
                    std::to_string(limits.cut_set_cap));
  }
  std::vector<std::vector<std::uint32_t>> raw;
  raw.reserve(static_cast<std::size_t>(total));
  std::vector<std::uint32_t> prefix;
  families.enumerate(solutions, prefix, raw);

  CutSetCollection out;
  out.sets.reserve(raw.size());
  for (const auto& vars : raw) {
    CutSetCollection::CutSet set;
    set.reserve(vars.size());
    for (auto v : vars) set.push_back(bdd.order()[v]);
    out.sets.push_back(std::move(set));
  }
  out.canonicalize();
  return out;
}

}  // namespace ftlab
