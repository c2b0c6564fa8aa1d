#include "ftlab/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <system_error>
#include <variant>

#include "ftlab/env.hpp"
#include "ftlab/error.hpp"
#include "ftlab/parse.hpp"

namespace ftlab {

namespace {

/// Failure reported to the client; never escapes handle().
struct ProtocolError {
  std::string code;
  std::string message;
  Json extra = Json::object();
};

[[noreturn]] void bad_request(const std::string& message) {
  throw ProtocolError{"BAD_REQUEST", message};
}

std::string_view wire_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEpisodeDone: return "EPISODE_DONE";
    case ErrorCode::kBadAction: return "BAD_ACTION";
    case ErrorCode::kCapacityExceeded:
    case ErrorCode::kCutSetLimit: return "CAPACITY";
    case ErrorCode::kInfeasibleConfig: return "INFEASIBLE";
    case ErrorCode::kTooLarge: return "TOO_LARGE";
    case ErrorCode::kSharedSubtree: return "SHARED_SUBTREE";
    default: return "BAD_REQUEST";
  }
}

const Json& payload_of(const Json& request) {
  static const Json empty = Json::object();
  auto it = request.find("payload");
  if (it == request.end() || it->is_null()) return empty;
  if (!it->is_object()) bad_request("payload must be an object");
  return *it;
}

std::string string_field(const Json& doc, const char* key,
                         std::optional<std::string> fallback = {}) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) {
    if (fallback) return *fallback;
    bad_request(std::string("missing field '") + key + "'");
  }
  if (!it->is_string()) bad_request(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::uint64_t seed_field(const Json& doc) {
  auto it = doc.find("seed");
  if (it == doc.end() || it->is_null()) return 0;
  if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() &&
                                   it->get<std::int64_t>() < 0)) {
    bad_request("'seed' must be a nonnegative integer");
  }
  return it->get<std::uint64_t>();
}

RewardMode mode_from_json(const Json& doc) {
  RewardMode mode;
  auto kind_of = [](const std::string& name) {
    if (name == "symmetric") return RewardKind::kSymmetric;
    if (name == "paper_pessimistic") return RewardKind::kPaperPessimistic;
    bad_request("unknown reward mode '" + name + "'");
  };
  if (doc.is_null()) return mode;
  if (doc.is_string()) {
    mode.kind = kind_of(doc.get<std::string>());
    return mode;
  }
  if (!doc.is_object()) bad_request("'mode' must be a string or an object");
  mode.kind = kind_of(string_field(doc, "kind", "symmetric"));
  if (auto it = doc.find("eps_rel"); it != doc.end()) {
    if (!it->is_number() || !(it->get<double>() > 0.0)) {
      bad_request("'eps_rel' must be a positive number");
    }
    mode.eps_rel = it->get<double>();
  }
  return mode;
}

CutSetAction cutset_action(const Json& action) {
  if (!action.is_object()) {
    throw ProtocolError{"BAD_ACTION", "cut-set action must be an object"};
  }
  auto text = [&](const char* key) {
    auto it = action.find(key);
    if (it == action.end() || !it->is_string()) {
      throw ProtocolError{"BAD_ACTION",
                          std::string("action needs string field '") + key + "'"};
    }
    return it->get<std::string>();
  };
  const std::string type = text("type");
  if (type == "remove_edge") return CutSetAction::remove_edge(text("child"), text("parent"));
  if (type == "remove_vertex") return CutSetAction::remove_vertex(text("id"));
  if (type == "submit") return CutSetAction::submit();
  throw ProtocolError{"BAD_ACTION", "unknown action type '" + type + "'"};
}

double vertex_action(const Json& action) {
  const Json* value = &action;
  if (action.is_object()) {
    auto it = action.find("prescribed");
    if (it == action.end()) {
      throw ProtocolError{"BAD_ACTION", "action needs field 'prescribed'"};
    }
    value = &*it;
  }
  if (!value->is_number()) {
    throw ProtocolError{"BAD_ACTION", "'prescribed' must be a number"};
  }
  return value->get<double>();
}

FaultTree tree_from_payload(const Json& payload) {
  const std::string source = string_field(payload, "tree_source");
  const std::string format = string_field(payload, "format", "auto");
  if (format == "ftdsl") return parse_ftdsl(source);
  if (format == "openpsa") return parse_openpsa(source);
  if (format == "auto") return parse_tree(source);
  bad_request("unknown format '" + format + "'");
}

Json cut_sets_json(const CutSetCollection& mcs) { return mcs.sets; }

/// Missing keys keep the GenConfig defaults.
GenConfig gen_config_from_json(const Json& doc) {
  GenConfig c;
  if (doc.is_null()) return c;
  if (!doc.is_object()) bad_request("'gen_config' must be an object");
  auto integer = [&](const char* key, int& out) {
    if (auto it = doc.find(key); it != doc.end()) {
      if (!it->is_number_integer()) bad_request(std::string("'") + key + "' must be an integer");
      out = it->get<int>();
    }
  };
  auto number = [&](const Json& j, const char* what) {
    if (!j.is_number()) bad_request(std::string("'") + what + "' must be a number");
    return j.get<double>();
  };
  integer("n_basic", c.n_basic);
  integer("n_gates", c.n_gates);
  integer("max_children", c.max_children);
  if (auto it = doc.find("gate_weights"); it != doc.end()) {
    if (it->is_array() && it->size() == 3) {
      c.gate_weights = {number((*it)[0], "gate_weights"), number((*it)[1], "gate_weights"),
                        number((*it)[2], "gate_weights")};
    } else if (it->is_object()) {
      if (it->contains("and")) c.gate_weights.and_weight = number((*it)["and"], "and");
      if (it->contains("or")) c.gate_weights.or_weight = number((*it)["or"], "or");
      if (it->contains("kofn")) c.gate_weights.kofn_weight = number((*it)["kofn"], "kofn");
    } else {
      bad_request("'gate_weights' must be [and, or, kofn] or an object");
    }
  }
  if (auto it = doc.find("p_range"); it != doc.end()) {
    if (!it->is_array() || it->size() != 2) bad_request("'p_range' must be [lo, hi]");
    c.p_lo = number((*it)[0], "p_range");
    c.p_hi = number((*it)[1], "p_range");
  }
  if (auto it = doc.find("share_prob"); it != doc.end()) {
    c.share_prob = number(*it, "share_prob");
  }
  return c;
}

}  // namespace

struct Server::Session {
  std::mutex mutex;
  std::variant<VertexQuantEnv, CutSetEnv> env;
};

Server::Server(ServerOptions options)
    : options_(options), tokens_(options.token_seed) {}

Server::~Server() = default;

std::size_t Server::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::string Server::handle_line(std::string_view line) {
  Json response;
  Json request = Json::parse(line.begin(), line.end(), nullptr, false);
  if (request.is_discarded()) {
    response = {{"ok", false},
                {"error", {{"code", "BAD_JSON"}, {"message", "request is not valid JSON"}}}};
  } else {
    response = handle(request);
  }
  return response.dump(-1, ' ', false, Json::error_handler_t::replace);
}

Json Server::handle(const Json& request) {
  Json response;
  try {
    if (!request.is_object()) bad_request("request must be an object");
    const std::string cmd = string_field(request, "cmd");
    response = {{"ok", true}, {"payload", dispatch(cmd, request)}};
  } catch (const ProtocolError& e) {
    Json error = {{"code", e.code}, {"message", e.message}};
    error.update(e.extra);
    response = {{"ok", false}, {"error", std::move(error)}};
  } catch (const ParseError& e) {
    response = {{"ok", false},
                {"error",
                 {{"code", "PARSE_ERROR"},
                  {"message", e.what()},
                  {"line", e.line()},
                  {"column", e.column()},
                  {"parse_code", to_string(e.code())}}}};
  } catch (const Error& e) {
    response = {{"ok", false},
                {"error", {{"code", wire_code(e.code())}, {"message", e.what()}}}};
  } catch (const Json::exception& e) {
    response = {{"ok", false},
                {"error", {{"code", "BAD_REQUEST"}, {"message", e.what()}}}};
  }
  if (request.is_object()) {
    if (auto it = request.find("id"); it != request.end()) response["id"] = *it;
  }
  return response;
}

Json Server::dispatch(const std::string& cmd, const Json& request) {
  const Json& payload = payload_of(request);
  if (cmd == "hello") return hello();
  if (cmd == "reset") return reset(payload);
  if (cmd == "step") return step(string_field(request, "session", ""), payload);
  if (cmd == "close") return close(string_field(request, "session", ""));
  if (cmd == "analyze") return analyze(payload);
  if (cmd == "generate") return generate_tree(payload);
  throw ProtocolError{"UNKNOWN_CMD", "unknown command '" + cmd + "'"};
}

Json Server::hello() const {
  return {{"version", kProtocolVersion},
          {"environments", {"vertex_quant", "cutset"}},
          {"limits",
           {{"max_sessions", options_.max_sessions},
            {"node_cap", options_.limits.node_cap},
            {"cut_set_cap", options_.limits.cut_set_cap},
            {"brute_force_max_basic", kBruteForceMaxBasic}}}};
}

Json Server::reset(const Json& payload) {
  const std::string env = string_field(payload, "env");
  if (env != "vertex_quant" && env != "cutset") {
    bad_request("unknown environment '" + env + "'");
  }
  const std::uint64_t seed = seed_field(payload);
  auto session = std::make_shared<Session>();
  Observation obs;
  std::optional<FaultTree> fixed;
  if (payload.contains("tree_source")) fixed = tree_from_payload(payload);
  const GenConfig config = gen_config_from_json(payload.value("gen_config", Json()));

  if (env == "vertex_quant") {
    const RewardMode mode = mode_from_json(payload.value("mode", Json()));
    VertexQuantEnv e(options_.limits.node_cap);
    obs = fixed ? e.reset(std::move(*fixed), mode) : e.reset(config, seed, mode);
    session->env = std::move(e);
  } else {
    std::optional<int> max_steps;
    if (auto it = payload.find("max_steps"); it != payload.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<int>() < 1) {
        bad_request("'max_steps' must be a positive integer");
      }
      max_steps = it->get<int>();
    }
    if (string_field(payload, "target", "any_cs") != "any_cs") {
      bad_request("only target 'any_cs' is supported");
    }
    CutSetEnv e(options_.limits);
    obs = fixed ? e.reset(std::move(*fixed), max_steps)
                : e.reset(config, seed, CutSetTarget::kAnyCutSet, max_steps);
    session->env = std::move(e);
  }

  std::string token;
  {
    std::lock_guard lock(mutex_);
    if (sessions_.size() >= options_.max_sessions) {
      throw ProtocolError{"SESSION_LIMIT", "session limit of " +
                                               std::to_string(options_.max_sessions) +
                                               " reached"};
    }
    do {
      char buf[17];
      std::snprintf(buf, sizeof(buf), "%016llx",
                    static_cast<unsigned long long>(tokens_.next()));
      token = buf;
    } while (sessions_.contains(token));
    sessions_.emplace(token, session);
  }
  return {{"session", token}, {"observation", obs.to_json()}};
}

std::shared_ptr<Server::Session> Server::find_session(const std::string& token) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) {
    throw ProtocolError{"UNKNOWN_SESSION", "no session '" + token + "'"};
  }
  return it->second;
}

Json Server::step(const std::string& token, const Json& payload) {
  auto session = find_session(token);
  auto it = payload.find("action");
  if (it == payload.end()) throw ProtocolError{"BAD_ACTION", "missing 'action'"};
  std::lock_guard lock(session->mutex);
  StepResult result;
  if (auto* env = std::get_if<VertexQuantEnv>(&session->env)) {
    result = env->step(vertex_action(*it));
  } else {
    result = std::get<CutSetEnv>(session->env).step(cutset_action(*it));
  }
  return result.to_json();
}

Json Server::close(const std::string& token) {
  std::lock_guard lock(mutex_);
  if (sessions_.erase(token) == 0) {
    throw ProtocolError{"UNKNOWN_SESSION", "no session '" + token + "'"};
  }
  return {{"closed", true}};
}

Json Server::analyze(const Json& payload) const {
  const FaultTree tree = tree_from_payload(payload);
  const std::string method = string_field(payload, "method", "bdd");
  Json stats = {{"method", method},
                {"basic_events", tree.basic_count()},
                {"gates", tree.gate_count()}};
  Json out;
  if (method == "bdd") {
    const Bdd bdd = build_bdd(tree, options_.limits.node_cap);
    out["top_probability"] = bdd_top_probability(bdd, basic_probabilities(tree));
    stats["bdd_nodes"] = bdd.size(bdd.root());
    if (payload.value("mcs", true)) {
      const CutSetCollection mcs = minimal_cut_sets(tree, options_.limits);
      out["mcs"] = cut_sets_json(mcs);
      stats["mcs_count"] = mcs.sets.size();
    }
  } else if (method == "brute") {
    out["top_probability"] = brute_force_probability(tree);
  } else if (method == "bottom_up") {
    out["top_probability"] = prob_bottom_up(tree).at(tree.top());
  } else {
    bad_request("unknown method '" + method + "'");
  }
  out["stats"] = std::move(stats);
  return out;
}

Json Server::generate_tree(const Json& payload) const {
  const GenConfig config = gen_config_from_json(payload.value("gen_config", Json()));
  const FaultTree tree = generate(config, seed_field(payload));
  const std::string format = string_field(payload, "format", "ftdsl");
  if (format == "ftdsl") return {{"tree", serialize_ftdsl(tree)}};
  if (format == "openpsa") return {{"tree", serialize_openpsa(tree)}};
  bad_request("unknown format '" + format + "'");
}

void Server::serve(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle_line(line) << '\n' << std::flush;
  }
}

TcpServer::TcpServer(Server& server, std::uint16_t port) : server_(server) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::system_error(errno, std::generic_category(), "socket");
  int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(listen_fd_, 16) < 0) {
    const int err = errno;
    ::close(listen_fd_);
    throw std::system_error(err, std::generic_category(), "bind/listen");
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  stop();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mutex_);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::run() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR && !stopping_) continue;
      break;
    }
    std::lock_guard lock(mutex_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    client_fds_.push_back(fd);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void TcpServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  std::lock_guard lock(mutex_);
  for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
}

void TcpServer::serve_connection(int fd) {
  std::string buffer;
  char chunk[4096];
  bool open = true;
  while (open) {
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos;
         start = nl + 1) {
      std::string_view line(buffer.data() + start, nl - start);
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      std::string reply = server_.handle_line(line);
      reply.push_back('\n');
      std::size_t sent = 0;
      while (sent < reply.size()) {
        const ssize_t w = ::send(fd, reply.data() + sent, reply.size() - sent, MSG_NOSIGNAL);
        if (w <= 0) {
          open = false;
          break;
        }
        sent += static_cast<std::size_t>(w);
      }
      if (!open) break;
    }
    buffer.erase(0, start);
  }
  std::lock_guard lock(mutex_);
  std::erase(client_fds_, fd);
  ::close(fd);
}

}  // namespace ftlab
