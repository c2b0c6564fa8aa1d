#include "ftlab/graph_doc.hpp"

#include <gtest/gtest.h>

#include "ftlab/quant.hpp"
#include "trees.hpp"

namespace ftlab {
namespace {

using testing::error_code;

TEST(GraphDocTest, Layout) {
  const Json doc = export_graph_doc(testing::vote(0.25), true);
  EXPECT_EQ(doc["top"], "TOP");
  EXPECT_EQ(doc["ordering"], Json::parse(R"(["A","B","C","TOP"])"));
  EXPECT_EQ(doc["edges"], Json::parse(R"([["A","TOP"],["B","TOP"],["C","TOP"]])"));
  const Json& top = doc["vertices"][3];
  EXPECT_EQ(top["id"], "TOP");
  EXPECT_EQ(top["kind"], "kofn");
  EXPECT_EQ(top["onehot"], Json::parse("[0,0,0,1]"));
  EXPECT_DOUBLE_EQ(top["k"].get<double>(), 2.0 / 3.0);
  EXPECT_TRUE(top["prob"].is_null());
  const Json& a = doc["vertices"][0];
  EXPECT_EQ(a["onehot"], Json::parse("[1,0,0,0]"));
  EXPECT_EQ(a["k"], 0.0);
  EXPECT_EQ(a["prob"].get<double>(), 0.25);
}

TEST(GraphDocTest, UnmaskedNeedsEveryGate) {
  const FaultTree t = testing::shared_and_of_ors();
  EXPECT_EQ(error_code([&] { export_graph_doc(t, false); }), ErrorCode::kMissingTruth);
  EXPECT_EQ(error_code([&] { export_graph_doc(t, false, ProbabilityMap{{"G1", 0.75}}); }),
            ErrorCode::kMissingTruth);
  const Json doc = export_graph_doc(t, false, gate_probabilities(t));
  for (const auto& v : doc["vertices"]) {
    EXPECT_FALSE(v["prob"].is_null()) << v.dump();
    if (v["id"] == "TOP") EXPECT_DOUBLE_EQ(v["prob"].get<double>(), 0.625);
  }
}

TEST(GraphDocTest, BasicProbabilitiesAreExact) {
  const FaultTree t = generate(testing::small_config(9, 4), 2);
  const Json doc = Json::parse(export_graph_doc(t, true).dump());
  for (const auto& v : doc["vertices"]) {
    if (v["kind"] == "basic") {
      EXPECT_EQ(v["prob"].get<double>(), *t.find(v["id"].get<std::string>())->prob);
    }
  }
}

TEST(GraphDocTest, Deterministic) {
  const FaultTree t = generate(testing::small_config(9, 4, 0.3), 8);
  EXPECT_EQ(export_graph_doc(t, true).dump(), export_graph_doc(t, true).dump());
}

}  // namespace
}  // namespace ftlab
