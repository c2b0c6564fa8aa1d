// ftlab command-line tool: analysis, generation and the environment server.

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "ftlab/error.hpp"
#include "ftlab/gen.hpp"
#include "ftlab/graph_doc.hpp"
#include "ftlab/parse.hpp"
#include "ftlab/quant.hpp"
#include "ftlab/server.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAnalysis = 2;

struct CapOptions {
  std::optional<std::size_t> node_cap;
  std::optional<std::size_t> cut_set_cap;

  ftlab::QuantLimits limits() const {
    ftlab::QuantLimits limits = ftlab::QuantLimits::from_env();
    if (node_cap) limits.node_cap = *node_cap;
    if (cut_set_cap) limits.cut_set_cap = *cut_set_cap;
    return limits;
  }
};

void add_cap_options(CLI::App* cmd, CapOptions& caps) {
  cmd->add_option("--node-cap", caps.node_cap, "BDD node limit (env FTLAB_NODE_CAP)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cut-set-cap", caps.cut_set_cap,
                  "Minimal cut set limit (env FTLAB_CUT_SET_CAP)")
      ->check(CLI::PositiveNumber);
}

void print(const ftlab::Json& doc) { std::cout << doc.dump() << '\n'; }

int run_analyze(const std::string& input, const std::string& method, bool with_mcs,
                const CapOptions& caps) {
  const ftlab::FaultTree tree = ftlab::load_tree(input);
  const ftlab::QuantLimits limits = caps.limits();
  ftlab::Json out = {{"method", method},
                     {"basic_events", tree.basic_count()},
                     {"gates", tree.gate_count()}};
  if (method == "bdd") {
    const ftlab::Bdd bdd = ftlab::build_bdd(tree, limits.node_cap);
    out["top_probability"] =
        ftlab::bdd_top_probability(bdd, ftlab::basic_probabilities(tree));
    out["bdd_nodes"] = bdd.size(bdd.root());
  } else if (method == "brute") {
    out["top_probability"] = ftlab::brute_force_probability(tree);
  } else {
    out["top_probability"] = ftlab::prob_bottom_up(tree).at(tree.top());
  }
  if (with_mcs) {
    const auto mcs = method == "brute" ? ftlab::brute_force_mcs(tree)
                                       : ftlab::minimal_cut_sets(tree, limits);
    out["mcs"] = mcs.sets;
  }
  print(out);
  return kExitOk;
}

int run_serve(const std::string& transport, int port, std::size_t max_sessions,
              std::uint64_t token_seed, const CapOptions& caps) {
  ftlab::ServerOptions options;
  options.max_sessions = max_sessions;
  options.limits = caps.limits();
  options.token_seed = token_seed;
  ftlab::Server server(options);
  if (transport == "stdio") {
    std::ios::sync_with_stdio(false);
    server.serve(std::cin, std::cout);
    return kExitOk;
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ftlab::TcpServer tcp(server, static_cast<std::uint16_t>(port));
  print({{"transport", "tcp"}, {"port", tcp.port()}});
  std::cout.flush();
  std::cerr << "ftlab: listening on 127.0.0.1:" << tcp.port() << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    tcp.stop();
  });
  tcp.run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-tree analysis engine and reinforcement-learning environment server"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ftlab::kProtocolVersion));

  CapOptions caps;

  std::string input;
  std::string method = "bdd";
  bool with_mcs = false;
  auto* analyze = app.add_subcommand("analyze", "Top-event probability of a tree");
  analyze->add_option("--input", input, "Tree file (.ft or .opsa.xml)")->required();
  analyze->add_option("--method", method, "Quantification method")
      ->check(CLI::IsMember({"bdd", "brute", "bottom-up"}));
  analyze->add_flag("--mcs", with_mcs, "Also list minimal cut sets");
  add_cap_options(analyze, caps);

  auto* mcs = app.add_subcommand("mcs", "Minimal cut sets of a tree");
  mcs->add_option("--input", input, "Tree file (.ft or .opsa.xml)")->required();
  add_cap_options(mcs, caps);

  ftlab::GenConfig config;
  std::uint64_t seed = 0;
  std::string out_file;
  std::string format = "ftdsl";
  std::vector<double> weights{1.0, 1.0, 1.0};
  auto* generate = app.add_subcommand("generate", "Random fault tree in canonical form");
  generate->add_option("--seed", seed, "Generator seed")->required();
  generate->add_option("--basic-events", config.n_basic, "Number of basic events")->required();
  generate->add_option("--gates", config.n_gates, "Number of gates")->required();
  generate->add_option("--max-children", config.max_children, "Gate arity limit")
      ->capture_default_str();
  generate->add_option("--share-prob", config.share_prob,
                       "Chance a basic event gets a second parent")
      ->capture_default_str();
  generate->add_option("--p-lo", config.p_lo, "Lowest basic-event probability")
      ->capture_default_str();
  generate->add_option("--p-hi", config.p_hi, "Highest basic-event probability")
      ->capture_default_str();
  generate->add_option("--weights", weights, "Gate weights: AND OR KOFN")->expected(3);
  generate->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"ftdsl", "openpsa"}));
  generate->add_option("--out", out_file, "Write to file instead of stdout");

  std::string transport = "stdio";
  int port = 0;
  std::size_t max_sessions = 64;
  std::uint64_t token_seed = ftlab::ServerOptions{}.token_seed;
  auto* serve = app.add_subcommand("serve", "Serve the ftlab/1 protocol");
  serve->add_option("--transport", transport, "stdio or tcp")
      ->check(CLI::IsMember({"stdio", "tcp"}));
  serve->add_option("--port", port, "TCP port (0 = ephemeral)")->check(CLI::Range(0, 65535));
  serve->add_option("--max-sessions", max_sessions, "Concurrent session cap")
      ->check(CLI::PositiveNumber);
  serve->add_option("--token-seed", token_seed, "Seed of the session-token stream");
  add_cap_options(serve, caps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      return run_analyze(input, method, with_mcs, caps);
    }
    if (mcs->parsed()) {
      const auto result = ftlab::minimal_cut_sets(ftlab::load_tree(input), caps.limits());
      print({{"mcs", result.sets}, {"count", result.sets.size()}});
      return kExitOk;
    }
    if (generate->parsed()) {
      config.gate_weights = {weights[0], weights[1], weights[2]};
      const ftlab::FaultTree tree = ftlab::generate(config, seed);
      const std::string text = format == "ftdsl" ? ftlab::serialize_ftdsl(tree)
                                                 : ftlab::serialize_openpsa(tree);
      if (out_file.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_file, std::ios::binary);
        if (!(out << text)) {
          std::cerr << "ftlab: cannot write " << out_file << '\n';
          return kExitAnalysis;
        }
      }
      return kExitOk;
    }
    return run_serve(transport, port, max_sessions, token_seed, caps);
  } catch (const ftlab::ParseError& e) {
    std::cerr << "ftlab: " << input << ":" << e.what() << '\n';
  } catch (const ftlab::Error& e) {
    std::cerr << "ftlab: " << ftlab::to_string(e.code()) << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "ftlab: " << e.what() << '\n';
  }
  return kExitAnalysis;
}
