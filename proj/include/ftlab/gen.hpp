#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "ftlab/fault_tree.hpp"

namespace ftlab {

struct GateWeights {
  double and_weight = 1.0;
  double or_weight = 1.0;
  double kofn_weight = 1.0;
};

struct GenConfig {
  int n_basic = 6;
  int n_gates = 3;
  int max_children = 3;
  GateWeights gate_weights;
  double p_lo = 0.01;
  double p_hi = 0.3;
  /// Chance that a basic event gets attached to one extra gate.
  double share_prob = 0.0;
};

/// Engine behind generate(); recorded in the top event's label.
inline constexpr std::string_view kGeneratorRng = "mt19937_64";

/// Throws kInfeasibleConfig for out-of-range fields or when n_gates gates of
/// arity 2..max_children cannot be filled by exactly n_basic basic events.
void check_config(const GenConfig& config);

/// Random fault tree, deterministic in (config, seed).
///
/// The top gate is TOP, further gates G1..G{m-1}, basic events BE1..BEn.
/// Steps, each drawing from one mt19937_64 stream seeded with `seed`:
///  1. gate i (i >= 1) becomes a child of a uniformly chosen earlier gate
///     with fewer than max_children children, a third or later child only
///     while n_basic leaves room to give every gate two children;
///  2. each basic event goes to a uniform gate among those with fewer than
///     two children, or, once none remain, among those with spare capacity;
///  3. gate kinds drawn by gate_weights, K-of-N threshold uniform in
///     [1, arity];
///  4. probabilities uniform in [p_lo, p_hi];
///  5. with probability share_prob a basic event also becomes a child of
///     one uniformly chosen other gate with spare capacity.
FaultTree generate(const GenConfig& config, std::uint64_t seed);

/// Portable draws on top of a raw 64-bit engine: no std distributions, whose
/// output is implementation-defined.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [0, 1) with 53 random bits.
  double unit();
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ftlab
