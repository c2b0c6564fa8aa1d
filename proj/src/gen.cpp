#include "ftlab/gen.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ftlab/error.hpp"

namespace ftlab {

std::uint64_t PortableRng::below(std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % n;
  }
}

double PortableRng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

namespace {

[[noreturn]] void infeasible(const std::string& message) {
  throw Error(ErrorCode::kInfeasibleConfig, message);
}

bool finite_nonnegative(double w) { return std::isfinite(w) && w >= 0.0; }

}  // namespace

void check_config(const GenConfig& c) {
  if (c.n_basic < 1) infeasible("n_basic must be >= 1");
  if (c.n_gates < 1) infeasible("n_gates must be >= 1");
  if (c.max_children < 2) infeasible("max_children must be >= 2");
  const GateWeights& w = c.gate_weights;
  if (!finite_nonnegative(w.and_weight) || !finite_nonnegative(w.or_weight) ||
      !finite_nonnegative(w.kofn_weight)) {
    infeasible("gate weights must be finite and nonnegative");
  }
  if (w.and_weight + w.or_weight + w.kofn_weight <= 0.0) {
    infeasible("gate weights must not all be zero");
  }
  if (!(c.p_lo >= 0.0 && c.p_lo <= c.p_hi && c.p_hi <= 1.0)) {
    infeasible("p_range must satisfy 0 <= lo <= hi <= 1");
  }
  if (!(c.share_prob >= 0.0 && c.share_prob <= 1.0)) {
    infeasible("share_prob must lie in [0, 1]");
  }
  // Every gate needs two children: the n_gates - 1 non-top gates plus the
  // basic events must cover 2 * n_gates slots without exceeding capacity.
  const long long basics = c.n_basic;
  const long long gates = c.n_gates;
  if (basics + gates - 1 < 2 * gates) {
    infeasible(std::to_string(c.n_basic) + " basic events cannot fill " +
               std::to_string(c.n_gates) + " gates of arity >= 2");
  }
  if (basics + gates - 1 > gates * c.max_children) {
    infeasible(std::to_string(c.n_basic) + " basic events exceed the capacity of " +
               std::to_string(c.n_gates) + " gates with max_children " +
               std::to_string(c.max_children));
  }
}

FaultTree generate(const GenConfig& config, std::uint64_t seed) {
  check_config(config);
  PortableRng rng(seed);
  const auto m = static_cast<std::size_t>(config.n_gates);
  const auto n = static_cast<std::size_t>(config.n_basic);
  const auto cap = static_cast<std::size_t>(config.max_children);

  std::vector<std::string> gate_ids(m);
  gate_ids[0] = "TOP";
  for (std::size_t i = 1; i < m; ++i) gate_ids[i] = "G" + std::to_string(i);
  std::vector<std::vector<std::string>> children(m);

  auto pick = [&](auto&& eligible, std::size_t limit) {
    std::vector<std::size_t> pool;
    for (std::size_t g = 0; g < limit; ++g) {
      if (eligible(g)) pool.push_back(g);
    }
    if (pool.empty()) return m;
    return pool[rng.below(pool.size())];
  };

  // Children beyond the first two of each gate come out of this budget, so
  // the basic events can always bring every gate up to two children.
  std::size_t slack = n - m - 1;
  for (std::size_t i = 1; i < m; ++i) {
    const std::size_t parent = pick(
        [&](std::size_t g) {
          return children[g].size() < cap && (children[g].size() < 2 || slack > 0);
        },
        i);
    if (children[parent].size() >= 2) --slack;
    children[parent].push_back(gate_ids[i]);
  }

  std::vector<std::string> basic_ids(n);
  for (std::size_t j = 0; j < n; ++j) {
    basic_ids[j] = "BE" + std::to_string(j + 1);
    std::size_t gate =
        pick([&](std::size_t g) { return children[g].size() < 2; }, m);
    if (gate == m) {
      gate = pick([&](std::size_t g) { return children[g].size() < cap; }, m);
    }
    if (gate == m) infeasible("no gate with spare capacity");
    children[gate].push_back(basic_ids[j]);
  }

  const GateWeights& w = config.gate_weights;
  const double total = w.and_weight + w.or_weight + w.kofn_weight;
  std::vector<VertexType> types(m);
  std::vector<int> thresholds(m, 0);
  for (std::size_t g = 0; g < m; ++g) {
    const double u = rng.unit() * total;
    if (u < w.and_weight) {
      types[g] = VertexType::kAnd;
    } else if (u < w.and_weight + w.or_weight || w.kofn_weight == 0.0) {
      types[g] = w.or_weight > 0.0 ? VertexType::kOr : VertexType::kAnd;
    } else {
      types[g] = VertexType::kKofN;
      thresholds[g] = 1 + static_cast<int>(rng.below(children[g].size()));
    }
  }

  std::vector<double> probs(n);
  for (std::size_t j = 0; j < n; ++j) {
    probs[j] = config.p_lo + (config.p_hi - config.p_lo) * rng.unit();
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (!rng.chance(config.share_prob)) continue;
    const std::size_t gate = pick(
        [&](std::size_t g) {
          if (children[g].size() >= cap) return false;
          return std::find(children[g].begin(), children[g].end(),
                           basic_ids[j]) == children[g].end();
        },
        m);
    if (gate != m) children[gate].push_back(basic_ids[j]);
  }

  FaultTree tree;
  for (std::size_t g = 0; g < m; ++g) {
    std::string label;
    if (g == 0) {
      label = "generator=" + std::string(kGeneratorRng) +
              " seed=" + std::to_string(seed);
    }
    tree.add_gate(gate_ids[g], types[g], std::move(children[g]), thresholds[g],
                  std::move(label));
  }
  for (std::size_t j = 0; j < n; ++j) tree.add_basic(basic_ids[j], probs[j]);
  tree.set_top(gate_ids[0]);
  return tree;
}

}  // namespace ftlab
