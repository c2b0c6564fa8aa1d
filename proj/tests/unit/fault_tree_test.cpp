#include "ftlab/fault_tree.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "ftlab/error.hpp"
#include "ftlab/gen.hpp"
#include "trees.hpp"

namespace ftlab {
namespace {

using testing::and2;
using testing::make_tree;

std::vector<ViolationCode> codes(const ValidationReport& r) {
  std::vector<ViolationCode> out;
  for (const auto& v : r.violations) out.push_back(v.code);
  return out;
}

TEST(ValidateTest, MinimalTreeIsValid) {
  const ValidationReport r = validate(and2());
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.violations.empty());
}

TEST(ValidateTest, TwoGateCycle) {
  FaultTree t = make_tree("TOP", VertexType::kOr, {"G1", "A"});
  t.add_gate("G1", VertexType::kAnd, {"G2", "A"});
  t.add_gate("G2", VertexType::kAnd, {"G1", "A"});
  t.add_basic("A", 0.1);
  const ValidationReport r = validate(t);
  ASSERT_FALSE(r.ok);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].code, ViolationCode::kCycle);
  EXPECT_EQ(r.violations[0].locus, "G1");
}

TEST(ValidateTest, EmptyGate) {
  FaultTree t = make_tree("TOP", VertexType::kOr, {"G1", "A"});
  t.add_gate("G1", VertexType::kAnd, {});
  t.add_basic("A", 0.1);
  const ValidationReport r = validate(t);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(codes(r), std::vector{ViolationCode::kEmptyGate});
}

TEST(ValidateTest, ReportsEveryViolationSorted) {
  FaultTree t;
  t.add_basic("TOP", 0.5);
  t.set_top("TOP");
  t.add_gate("K", VertexType::kKofN, {"X", "X"}, 3);
  t.add_basic("bad", 1.5);
  Vertex weird;
  weird.id = "9lives";
  weird.type = VertexType::kBasic;
  t.add_vertex(weird);
  const ValidationReport r = validate(t);
  EXPECT_FALSE(r.ok);
  const auto c = codes(r);
  EXPECT_TRUE(std::is_sorted(r.violations.begin(), r.violations.end(),
                             [](const Violation& a, const Violation& b) {
                               return std::pair(a.code, a.locus) < std::pair(b.code, b.locus);
                             }));
  for (ViolationCode expected :
       {ViolationCode::kBadId, ViolationCode::kBadProbability, ViolationCode::kDuplicateEdge,
        ViolationCode::kKofNRange, ViolationCode::kMissingProbability, ViolationCode::kOrphan,
        ViolationCode::kTopNotGate, ViolationCode::kUnknownChild}) {
    EXPECT_NE(std::find(c.begin(), c.end(), expected), c.end()) << to_string(expected);
  }
  // Same input, same report.
  const ValidationReport again = validate(t);
  EXPECT_EQ(r.violations, again.violations);
}

TEST(ValidateTest, KofNNeedsTwoChildren) {
  FaultTree t = make_tree("TOP", VertexType::kKofN, {"A"}, 1);
  t.add_basic("A", 0.1);
  EXPECT_EQ(codes(validate(t)), std::vector{ViolationCode::kKofNArity});
}

TEST(ValidateTest, SelfLoopAndMissingTop) {
  FaultTree t = make_tree("TOP", VertexType::kOr, {"TOP", "A"});
  t.add_basic("A", 0.1);
  EXPECT_EQ(codes(validate(t)), std::vector{ViolationCode::kSelfLoop});

  FaultTree u = and2();
  u.set_top("NOPE");
  const auto c = codes(validate(u));
  EXPECT_NE(std::find(c.begin(), c.end(), ViolationCode::kTopMissing), c.end());
}

TEST(ValidateTest, NoBasicEvents) {
  FaultTree t = make_tree("TOP", VertexType::kOr, {"G"});
  t.add_gate("G", VertexType::kAnd, {});
  const auto c = codes(validate(t));
  EXPECT_NE(std::find(c.begin(), c.end(), ViolationCode::kNoBasicEvents), c.end());
}

TEST(StructureEvalTest, GateSemantics) {
  EXPECT_TRUE(structure_eval(and2(), {{"BE1", true}, {"BE2", true}}));
  EXPECT_FALSE(structure_eval(and2(), {{"BE1", true}, {"BE2", false}}));
  const FaultTree vote = testing::vote();
  EXPECT_TRUE(structure_eval(vote, {{"A", true}, {"B", true}, {"C", false}}));
  EXPECT_FALSE(structure_eval(vote, {{"A", true}, {"B", false}, {"C", false}}));
}

TEST(StructureEvalTest, MalformedAssignments) {
  try {
    structure_eval(and2(), {{"BE1", true}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingAssignment);
  }
  try {
    structure_eval(and2(), {{"BE1", true}, {"BE2", true}, {"ZZZ", false}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownId);
  }
  try {
    structure_eval(and2(), {{"BE1", true}, {"BE2", true}, {"TOP", false}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownId);
  }
}

// Coherence: turning any basic event on never turns the top off.
TEST(StructureEvalTest, MonotoneOnGeneratedTrees) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const FaultTree t = generate(testing::small_config(6, 3, 0.3), seed);
    const auto basics = t.basic_events();
    for (unsigned mask = 0; mask < (1u << basics.size()); ++mask) {
      std::map<std::string, bool, std::less<>> a;
      for (std::size_t i = 0; i < basics.size(); ++i) a[basics[i]] = (mask >> i) & 1u;
      if (!structure_eval(t, a)) continue;
      for (std::size_t i = 0; i < basics.size(); ++i) {
        if (a[basics[i]]) continue;
        auto raised = a;
        raised[basics[i]] = true;
        ASSERT_TRUE(structure_eval(t, raised)) << "seed " << seed;
      }
    }
  }
}

TEST(TopologicalOrderTest, TieBreakById) {
  EXPECT_EQ(topological_order(and2()), (std::vector<std::string>{"BE1", "BE2", "TOP"}));
}

TEST(TopologicalOrderTest, Chain) {
  FaultTree t = make_tree("TOP", VertexType::kOr, {"G1"});
  t.add_gate("G1", VertexType::kOr, {"BE1"});
  t.add_basic("BE1", 0.3);
  EXPECT_EQ(topological_order(t), (std::vector<std::string>{"BE1", "G1", "TOP"}));
}

TEST(TopologicalOrderTest, SharedEventPrecedesBothParents) {
  const FaultTree t = testing::shared_and_of_ors();
  const auto order = topological_order(t);
  auto pos = [&](const std::string& id) {
    return std::find(order.begin(), order.end(), id) - order.begin();
  };
  EXPECT_LT(pos("A"), pos("G1"));
  EXPECT_LT(pos("A"), pos("G2"));
  EXPECT_EQ(order, topological_order(t));
}

TEST(TopologicalOrderTest, CycleThrows) {
  FaultTree t = make_tree("TOP", VertexType::kOr, {"G1"});
  t.add_gate("G1", VertexType::kOr, {"TOP"});
  EXPECT_THROW(topological_order(t), Error);
}

TEST(AdjacencyTest, ChildToParentEntries) {
  const auto a = adjacency_matrix(and2(), {"TOP", "BE1", "BE2"});
  const AdjacencyMatrix expected = {{0, 0, 0}, {1, 0, 0}, {1, 0, 0}};
  EXPECT_EQ(a, expected);
}

TEST(AdjacencyTest, ChainIsTriangular) {
  FaultTree t = make_tree("TOP", VertexType::kOr, {"G1"});
  t.add_gate("G1", VertexType::kOr, {"BE1"});
  t.add_basic("BE1", 0.3);
  const auto a = adjacency_matrix(t, topological_order(t));
  for (std::size_t m = 0; m < a.size(); ++m) {
    for (std::size_t n = 0; n <= m; ++n) EXPECT_EQ(a[m][n], 0);
  }
  EXPECT_EQ(a[0][1], 1);
  EXPECT_EQ(a[1][2], 1);
}

TEST(AdjacencyTest, BadOrder) {
  EXPECT_THROW(adjacency_matrix(and2(), {"TOP", "BE1"}), Error);
  EXPECT_THROW(adjacency_matrix(and2(), {"TOP", "BE1", "BE1"}), Error);
  EXPECT_THROW(adjacency_matrix(and2(), {"TOP", "BE1", "X"}), Error);
}

TEST(AdjacencyTest, SelfLoopIsTwo) {
  FaultTree t = make_tree("TOP", VertexType::kOr, {"TOP", "A"});
  t.add_basic("A", 0.1);
  const auto a = adjacency_matrix(t, {"A", "TOP"});
  EXPECT_EQ(a[1][1], 2);
}

TEST(AdjacencyTest, GeneratedTreesAreZeroOneWithZeroTrace) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const FaultTree t = generate(testing::small_config(8, 4, 0.3), seed);
    const auto a = adjacency_matrix(t, topological_order(t));
    std::size_t ones = 0;
    for (std::size_t m = 0; m < a.size(); ++m) {
      EXPECT_EQ(a[m][m], 0);
      for (int v : a[m]) {
        EXPECT_TRUE(v == 0 || v == 1);
        ones += v;
      }
    }
    EXPECT_EQ(ones, t.edges().size());
  }
}

TEST(FaultTreeTest, RemoveVertexDropsEdges) {
  FaultTree t = testing::shared_and_of_ors();
  ASSERT_TRUE(t.remove_vertex("A"));
  EXPECT_EQ(t.find("G1")->children, std::vector<std::string>{"B"});
  EXPECT_EQ(t.find("G2")->children, std::vector<std::string>{"C"});
  EXPECT_FALSE(t.remove_vertex("A"));
  EXPECT_FALSE(t.remove_edge("B", "G2"));
  EXPECT_TRUE(t.remove_edge("B", "G1"));
}

}  // namespace
}  // namespace ftlab
