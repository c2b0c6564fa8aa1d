#include "ftlab/quant.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "ftlab/bdd.hpp"
#include "ftlab/gen.hpp"
#include "oracle.hpp"
#include "trees.hpp"

namespace ftlab {
namespace {

using testing::error_code;
using testing::make_tree;

constexpr double kTol = 1e-12;

TEST(BottomUpTest, Examples) {
  EXPECT_NEAR(prob_bottom_up(testing::and2()).at("TOP"), 0.02, kTol);
  FaultTree o = make_tree("TOP", VertexType::kOr, {"A", "B"});
  o.add_basic("A", 0.1);
  o.add_basic("B", 0.2);
  EXPECT_NEAR(prob_bottom_up(o).at("TOP"), 0.28, kTol);
  EXPECT_NEAR(prob_bottom_up(testing::vote(0.5)).at("TOP"), 0.5, kTol);
}

TEST(BottomUpTest, KofNExtremes) {
  // 1-of-n is OR, n-of-n is AND.
  FaultTree any = make_tree("TOP", VertexType::kKofN, {"A", "B", "C"}, 1);
  FaultTree all = make_tree("TOP", VertexType::kKofN, {"A", "B", "C"}, 3);
  for (FaultTree* t : {&any, &all}) {
    t->add_basic("A", 0.1);
    t->add_basic("B", 0.2);
    t->add_basic("C", 0.3);
  }
  EXPECT_NEAR(prob_bottom_up(any).at("TOP"), 1 - 0.9 * 0.8 * 0.7, kTol);
  EXPECT_NEAR(prob_bottom_up(all).at("TOP"), 0.1 * 0.2 * 0.3, kTol);
}

TEST(BottomUpTest, RejectsSharing) {
  EXPECT_EQ(error_code([] { prob_bottom_up(testing::shared_and_of_ors()); }),
            ErrorCode::kSharedSubtree);
}

TEST(BddTest, AndHasTwoNodes) {
  const Bdd bdd = build_bdd(testing::and2());
  EXPECT_EQ(bdd.size(bdd.root()), 2u);
  EXPECT_NEAR(bdd_top_probability(bdd, basic_probabilities(testing::and2())), 0.02, kTol);
}

TEST(BddTest, Canonical) {
  Bdd bdd({"A", "B"});
  const Bdd::Ref a = bdd.variable(0);
  const Bdd::Ref b = bdd.variable(1);
  EXPECT_EQ(bdd.disjunction(a, a), a);
  EXPECT_EQ(bdd.conjunction(a, b), bdd.conjunction(b, a));
  EXPECT_EQ(bdd.conjunction(a, Bdd::kFalse), Bdd::kFalse);
  EXPECT_EQ(bdd.disjunction(a, Bdd::kTrue), Bdd::kTrue);
  const Bdd::Ref inputs[] = {a, b};
  EXPECT_EQ(bdd.threshold(1, inputs), bdd.disjunction(a, b));
  EXPECT_EQ(bdd.threshold(2, inputs), bdd.conjunction(a, b));
  EXPECT_EQ(bdd.threshold(0, inputs), Bdd::kTrue);
  EXPECT_EQ(bdd.threshold(3, inputs), Bdd::kFalse);
}

TEST(BddTest, DuplicatedChildCollapses) {
  FaultTree t = make_tree("TOP", VertexType::kOr, {"A", "G"});
  t.add_gate("G", VertexType::kAnd, {"A", "B"});
  t.add_basic("A", 0.3);
  t.add_basic("B", 0.4);
  const Bdd bdd = build_bdd(t);
  // A OR (A AND B) = A
  EXPECT_EQ(bdd.size(bdd.root()), 1u);
  EXPECT_NEAR(bdd_top_probability(bdd, basic_probabilities(t)), 0.3, kTol);
}

TEST(BddTest, SharedEventExact) {
  const FaultTree t = testing::shared_and_of_ors(0.5);
  const Bdd bdd = build_bdd(t);
  const double expected = 0.5 + 0.5 * 0.5 * 0.5;
  EXPECT_NEAR(bdd_top_probability(bdd, basic_probabilities(t)), expected, kTol);
  EXPECT_NEAR(testing::enumerate_probability(t), expected, kTol);
  EXPECT_NEAR(brute_force_probability(t), expected, kTol);
}

TEST(BddTest, VariableOrderIsDepthFirst) {
  const FaultTree t = testing::shared_and_of_ors();
  EXPECT_EQ(variable_order(t), (std::vector<std::string>{"A", "B", "C"}));
  const Bdd bdd = build_bdd(t);
  EXPECT_EQ(bdd.order(), variable_order(t));
}

TEST(BddTest, NodesFollowChildren) {
  const FaultTree t = generate(testing::small_config(10, 5, 0.3), 11);
  const Bdd bdd = build_bdd(t);
  for (std::size_t i = 2; i < bdd.nodes().size(); ++i) {
    const Bdd::Node& n = bdd.nodes()[i];
    EXPECT_LT(n.low, i);
    EXPECT_LT(n.high, i);
    EXPECT_NE(n.low, n.high);
    for (Bdd::Ref child : {n.low, n.high}) {
      if (!Bdd::is_terminal(child)) EXPECT_LT(n.var, bdd.node(child).var);
    }
  }
}

TEST(BddTest, NodeCap) {
  const FaultTree t = generate(testing::small_config(12, 5, 0.3), 3);
  EXPECT_EQ(error_code([&] { build_bdd(t, 3); }), ErrorCode::kCapacityExceeded);
}

TEST(BddTest, MissingProbability) {
  const Bdd bdd = build_bdd(testing::and2());
  EXPECT_EQ(error_code([&] { bdd_top_probability(bdd, {{"BE1", 0.5}}); }),
            ErrorCode::kMissingProbability);
}

TEST(QuantTest, AgreesWithOracleOnGeneratedTrees) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const FaultTree t = generate(testing::random_config(seed, 11, seed % 2 ? 0.4 : 0.0), seed);
    const double oracle = testing::enumerate_probability(t);
    const Bdd bdd = build_bdd(t);
    ASSERT_NEAR(bdd_top_probability(bdd, basic_probabilities(t)), oracle, kTol) << seed;
    ASSERT_NEAR(brute_force_probability(t), oracle, kTol) << seed;
    const ProbabilityMap gates = gate_probabilities(t);
    for (const auto& g : t.gates()) {
      ASSERT_NEAR(gates.at(g), testing::enumerate_probability(t, g), kTol) << seed << " " << g;
    }
    if (seed % 2 == 0) {
      const ProbabilityMap up = prob_bottom_up(t);
      ASSERT_NEAR(up.at(t.top()), oracle, kTol) << seed;
    }
  }
}

TEST(QuantTest, MonotoneInBasicProbabilities) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const FaultTree t = generate(testing::random_config(seed, 10, 0.3), seed);
    const Bdd bdd = build_bdd(t);
    const ProbabilityMap base = basic_probabilities(t);
    const double p = bdd_top_probability(bdd, base);
    for (const auto& [id, q] : base) {
      ProbabilityMap raised = base;
      raised[id] = std::min(1.0, q + 0.1);
      ASSERT_GE(bdd_top_probability(bdd, raised), p - kTol) << seed << " " << id;
    }
  }
}

TEST(BruteForceTest, TooLarge) {
  const FaultTree big = generate(testing::small_config(21, 8), 1);
  EXPECT_EQ(error_code([&] { brute_force_probability(big); }), ErrorCode::kTooLarge);
  const FaultTree mid = generate(testing::small_config(17, 8), 1);
  EXPECT_EQ(error_code([&] { brute_force_mcs(mid); }), ErrorCode::kTooLarge);
}

TEST(McsTest, Examples) {
  using Sets = std::vector<std::vector<std::string>>;
  EXPECT_EQ(minimal_cut_sets(testing::and2()).sets, (Sets{{"BE1", "BE2"}}));
  EXPECT_EQ(minimal_cut_sets(testing::or3()).sets, (Sets{{"BE1"}, {"BE2"}, {"BE3"}}));
  EXPECT_EQ(minimal_cut_sets(testing::vote()).sets, (Sets{{"A", "B"}, {"A", "C"}, {"B", "C"}}));
  EXPECT_EQ(minimal_cut_sets(testing::shared_and_of_ors()).sets, (Sets{{"A"}, {"B", "C"}}));
}

TEST(McsTest, AgreesWithOracles) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const FaultTree t = generate(testing::random_config(seed, 10, 0.35), seed);
    const CutSetCollection mcs = minimal_cut_sets(t);
    ASSERT_EQ(testing::as_family(mcs.sets), testing::enumerate_mcs(t)) << seed;
    ASSERT_EQ(mcs, brute_force_mcs(t)) << seed;
    CutSetCollection sorted = mcs;
    sorted.canonicalize();
    ASSERT_EQ(sorted, mcs);
  }
}

TEST(McsTest, EverySetIsMinimal) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const FaultTree t = generate(testing::random_config(seed, 12, 0.3), seed);
    for (const auto& s : minimal_cut_sets(t).sets) {
      std::set<std::string, std::less<>> cs(s.begin(), s.end());
      ASSERT_TRUE(is_cut_set(t, cs));
      for (const auto& drop : s) {
        auto smaller = cs;
        smaller.erase(drop);
        ASSERT_FALSE(is_cut_set(t, smaller)) << seed;
      }
    }
  }
}

TEST(McsTest, CutSetCap) {
  QuantLimits limits;
  limits.cut_set_cap = 2;
  EXPECT_EQ(error_code([&] { minimal_cut_sets(testing::or3(), limits); }),
            ErrorCode::kCutSetLimit);
  limits.cut_set_cap = 3;
  EXPECT_EQ(minimal_cut_sets(testing::or3(), limits).sets.size(), 3u);
}

TEST(McsTest, IsCutSetRejectsUnknown) {
  EXPECT_EQ(error_code([] { is_cut_set(testing::and2(), {"BE1", "X"}); }),
            ErrorCode::kUnknownId);
  EXPECT_EQ(error_code([] { is_cut_set(testing::and2(), {"BE1", "TOP"}); }),
            ErrorCode::kUnknownId);
  EXPECT_TRUE(is_cut_set(testing::and2(), {"BE1", "BE2"}));
  EXPECT_FALSE(is_cut_set(testing::and2(), {"BE1"}));
}

TEST(McsTest, BoundsContainProbability) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const FaultTree t = generate(testing::random_config(seed, 12, 0.3), seed);
    const ProbabilityMap probs = basic_probabilities(t);
    const ProbabilityBounds b = mcs_bounds(minimal_cut_sets(t), probs);
    const double p = bdd_top_probability(build_bdd(t), probs);
    ASSERT_LE(b.lower, p + kTol) << seed;
    ASSERT_GE(b.upper, p - kTol) << seed;
    ASSERT_LE(b.upper, 1.0);
  }
}

TEST(QuantLimitsTest, Defaults) {
  const QuantLimits limits;
  EXPECT_EQ(limits.node_cap, std::size_t{1} << 22);
  EXPECT_EQ(limits.cut_set_cap, 1'000'000u);
}

TEST(QuantLimitsTest, EnvironmentOverrides) {
  ::setenv("FTLAB_NODE_CAP", "123", 1);
  ::setenv("FTLAB_CUT_SET_CAP", "45", 1);
  const QuantLimits limits = QuantLimits::from_env();
  ::unsetenv("FTLAB_NODE_CAP");
  ::unsetenv("FTLAB_CUT_SET_CAP");
  EXPECT_EQ(limits.node_cap, 123u);
  EXPECT_EQ(limits.cut_set_cap, 45u);
  EXPECT_EQ(QuantLimits::from_env().node_cap, QuantLimits{}.node_cap);
}

}  // namespace
}  // namespace ftlab
