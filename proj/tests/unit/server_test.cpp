#include "ftlab/server.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "ftlab/gen.hpp"
#include "ftlab/parse.hpp"
#include "line_client.hpp"

namespace ftlab {
namespace {

Json call(Server& s, const std::string& line) { return Json::parse(s.handle_line(line)); }

std::string error_of(const Json& r) {
  EXPECT_FALSE(r["ok"].get<bool>()) << r.dump();
  return r["error"]["code"].get<std::string>();
}

constexpr const char* kAnd2 =
    R"(top TOP = AND(BE1, BE2)\nbasic BE1 p=0.1\nbasic BE2 p=0.2\n)";

TEST(ServerTest, Hello) {
  Server s;
  const Json r = call(s, R"({"cmd":"hello","id":7})");
  ASSERT_TRUE(r["ok"].get<bool>());
  EXPECT_EQ(r["payload"]["version"], "ftlab/1");
  EXPECT_EQ(r["id"], 7);
  EXPECT_EQ(r["payload"]["environments"], Json::parse(R"(["vertex_quant","cutset"])"));
}

TEST(ServerTest, MalformedRequests) {
  Server s;
  EXPECT_EQ(error_of(call(s, "{not json")), "BAD_JSON");
  EXPECT_EQ(error_of(call(s, "[1,2]")), "BAD_REQUEST");
  EXPECT_EQ(error_of(call(s, R"({"cmd":"dance"})")), "UNKNOWN_CMD");
  EXPECT_EQ(error_of(call(s, R"({"cmd":"step","session":"nope","payload":{"action":0.1}})")),
            "UNKNOWN_SESSION");
  EXPECT_EQ(error_of(call(s, R"({"cmd":"reset","payload":{"env":"chess"}})")), "BAD_REQUEST");
  EXPECT_EQ(
      error_of(call(s, R"({"cmd":"reset","payload":{"env":"cutset","gen_config":{"n_basic":2,"n_gates":5}}})")),
      "INFEASIBLE");
}

TEST(ServerTest, AnalyzeMethods) {
  Server s;
  const Json brute = call(s, std::string(R"({"cmd":"analyze","payload":{"method":"brute","tree_source":")") +
                                 kAnd2 + R"("}})");
  ASSERT_TRUE(brute["ok"].get<bool>()) << brute.dump();
  EXPECT_NEAR(brute["payload"]["top_probability"].get<double>(), 0.02, 1e-12);

  const Json bdd = call(s, std::string(R"({"cmd":"analyze","payload":{"tree_source":")") + kAnd2 +
                               R"("}})");
  ASSERT_TRUE(bdd["ok"].get<bool>());
  EXPECT_NEAR(bdd["payload"]["top_probability"].get<double>(), 0.02, 1e-12);
  EXPECT_EQ(bdd["payload"]["mcs"], Json::parse(R"([["BE1","BE2"]])"));
  EXPECT_EQ(bdd["payload"]["stats"]["bdd_nodes"], 2);

  const Json up = call(s, std::string(R"({"cmd":"analyze","payload":{"method":"bottom_up","tree_source":")") +
                              kAnd2 + R"("}})");
  EXPECT_NEAR(up["payload"]["top_probability"].get<double>(), 0.02, 1e-12);
}

TEST(ServerTest, ParseErrorsCarryPositions) {
  Server s;
  const Json r = call(s, R"({"cmd":"analyze","payload":{"tree_source":"top TOP = AND(A, Z)\nbasic A p=0.1\n"}})");
  EXPECT_EQ(error_of(r), "PARSE_ERROR");
  EXPECT_EQ(r["error"]["line"], 1);
  EXPECT_EQ(r["error"]["parse_code"], "UNKNOWN_REF");
}

TEST(ServerTest, VertexEpisode) {
  Server s;
  const Json reset = call(s, std::string(R"({"cmd":"reset","payload":{"env":"vertex_quant","tree_source":")") +
                                 kAnd2 + R"("}})");
  ASSERT_TRUE(reset["ok"].get<bool>()) << reset.dump();
  const std::string token = reset["payload"]["session"];
  EXPECT_EQ(token.size(), 16u);
  EXPECT_EQ(reset["payload"]["observation"]["query"], "TOP");
  const std::string step = R"({"cmd":"step","session":")" + token + R"(","payload":{"action":)" +
                           Json(0.1 * 0.2).dump() + "}}";
  const Json r = call(s, step);
  ASSERT_TRUE(r["ok"].get<bool>()) << r.dump();
  EXPECT_EQ(r["payload"]["reward"], 1.0);
  EXPECT_TRUE(r["payload"]["done"].get<bool>());
  EXPECT_EQ(error_of(call(s, step)), "EPISODE_DONE");
  EXPECT_EQ(error_of(call(s, R"({"cmd":"step","session":")" + token +
                                 R"(","payload":{"action":7}})")),
            "EPISODE_DONE");
}

TEST(ServerTest, CutSetEpisodeAndBadActions) {
  Server s;
  const Json reset = call(s, R"({"cmd":"reset","payload":{"env":"cutset","seed":3,"gen_config":{"n_basic":5,"n_gates":2}}})");
  ASSERT_TRUE(reset["ok"].get<bool>()) << reset.dump();
  const std::string token = reset["payload"]["session"];
  auto step = [&](const std::string& action) {
    return call(s, R"({"cmd":"step","session":")" + token + R"(","payload":{"action":)" + action + "}}");
  };
  EXPECT_EQ(error_of(step(R"({"type":"explode"})")), "BAD_ACTION");
  EXPECT_EQ(error_of(call(s, R"({"cmd":"step","session":")" + token + R"(","payload":{}})")),
            "BAD_ACTION");
  const Json rejected = step(R"({"type":"remove_vertex","id":"TOP"})");
  ASSERT_TRUE(rejected["ok"].get<bool>());
  EXPECT_EQ(rejected["payload"]["reward"], -1.0);
  const Json done = step(R"({"type":"submit"})");
  EXPECT_TRUE(done["payload"]["done"].get<bool>());
  EXPECT_EQ(done["payload"]["reward"], 0.0);
}

TEST(ServerTest, GroundTruthOnlyAtEpisodeEnd) {
  Server s;
  for (const char* env : {"vertex_quant", "cutset"}) {
    const Json reset = call(s, std::string(R"({"cmd":"reset","payload":{"env":")") + env +
                                   R"(","seed":6,"gen_config":{"n_basic":6,"n_gates":3}}})");
    const std::string token = reset["payload"]["session"];
    const std::string action = std::string(env) == "cutset" ? R"({"type":"submit"})" : "0.5";
    bool done = false;
    while (!done) {
      const Json r = call(s, R"({"cmd":"step","session":")" + token + R"(","payload":{"action":)" +
                                 action + "}}");
      ASSERT_TRUE(r["ok"].get<bool>()) << r.dump();
      done = r["payload"]["done"].get<bool>();
      EXPECT_EQ(r["payload"]["info"].contains("ground_truth"), done) << env;
    }
  }
}

TEST(ServerTest, SessionsAreIsolated) {
  Server s;
  const std::string reset = R"({"cmd":"reset","payload":{"env":"vertex_quant","seed":1}})";
  const std::string a = call(s, reset)["payload"]["session"];
  const std::string b = call(s, reset)["payload"]["session"];
  EXPECT_NE(a, b);
  EXPECT_EQ(s.session_count(), 2u);
  EXPECT_TRUE(call(s, R"({"cmd":"close","session":")" + a + R"("})")["payload"]["closed"].get<bool>());
  EXPECT_EQ(error_of(call(s, R"({"cmd":"step","session":")" + a + R"(","payload":{"action":0.1}})")),
            "UNKNOWN_SESSION");
  EXPECT_TRUE(call(s, R"({"cmd":"step","session":")" + b + R"(","payload":{"action":0.1}})")["ok"]
                  .get<bool>());
  EXPECT_EQ(error_of(call(s, R"({"cmd":"close","session":")" + a + R"("})")), "UNKNOWN_SESSION");
}

TEST(ServerTest, SessionLimit) {
  ServerOptions options;
  options.max_sessions = 1;
  Server s(options);
  const std::string reset = R"({"cmd":"reset","payload":{"env":"cutset","seed":1}})";
  EXPECT_TRUE(call(s, reset)["ok"].get<bool>());
  EXPECT_EQ(error_of(call(s, reset)), "SESSION_LIMIT");
}

TEST(ServerTest, GenerateMatchesLibrary) {
  Server s;
  const Json r = call(s, R"({"cmd":"generate","payload":{"seed":5,"gen_config":{"n_basic":7,"n_gates":3}}})");
  ASSERT_TRUE(r["ok"].get<bool>()) << r.dump();
  GenConfig c;
  c.n_basic = 7;
  c.n_gates = 3;
  EXPECT_EQ(r["payload"]["tree"], serialize_ftdsl(generate(c, 5)));
}

std::vector<std::string> script() {
  return {
      R"({"cmd":"hello"})",
      R"({"cmd":"reset","payload":{"env":"vertex_quant","seed":4,"gen_config":{"n_basic":6,"n_gates":3,"share_prob":0.3}}})",
      R"({"cmd":"reset","payload":{"env":"cutset","seed":4}})",
      R"({"cmd":"analyze","payload":{"tree_source":"top T = OR(A, B)\nbasic A p=0.5\nbasic B p=0.25\n"}})",
  };
}

TEST(ServerTest, StdioTranscriptIsDeterministic) {
  std::string input;
  for (const auto& line : script()) input += line + "\n\n";
  auto run = [&] {
    Server s;
    std::istringstream in(input);
    std::ostringstream out;
    s.serve(in, out);
    return out.str();
  };
  const std::string first = run();
  EXPECT_EQ(first, run());
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), static_cast<long>(script().size()));
}

TEST(ServerTest, TcpMatchesStdio) {
  Server direct;
  std::vector<std::string> expected;
  for (const auto& line : script()) expected.push_back(direct.handle_line(line));

  Server s;
  TcpServer tcp(s, 0);
  ASSERT_NE(tcp.port(), 0);
  std::thread loop([&] { tcp.run(); });
  {
    testing::LineClient client(tcp.port());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_EQ(client.request(script()[i]), expected[i]);
    }
  }
  tcp.stop();
  loop.join();
}

TEST(ServerTest, ConcurrentClients) {
  Server s;
  TcpServer tcp(s, 0);
  std::thread loop([&] { tcp.run(); });
  std::vector<std::thread> clients;
  std::atomic<int> ok{0};
  for (int c = 0; c < 4; ++c) {
    clients.emplace_back([&, c] {
      testing::LineClient client(tcp.port());
      const Json reset = Json::parse(client.request(
          R"({"cmd":"reset","payload":{"env":"vertex_quant","seed":)" + std::to_string(c) + "}}"));
      const std::string token = reset["payload"]["session"];
      bool done = false;
      while (!done) {
        const Json r = Json::parse(client.request(R"({"cmd":"step","session":")" + token +
                                                  R"(","payload":{"action":0.5}})"));
        done = r["payload"]["done"].get<bool>();
      }
      ++ok;
    });
  }
  for (auto& t : clients) t.join();
  tcp.stop();
  loop.join();
  EXPECT_EQ(ok.load(), 4);
}

}  // namespace
}  // namespace ftlab
