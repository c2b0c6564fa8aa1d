#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ftlab/gen.hpp"
#include "ftlab/graph_doc.hpp"
#include "ftlab/quant.hpp"

namespace ftlab {

inline constexpr std::string_view kProtocolVersion = "ftlab/1";

struct ServerOptions {
  std::size_t max_sessions = 64;
  QuantLimits limits;
  /// Seeds the session-token stream, so scripted runs replay byte-for-byte.
  std::uint64_t token_seed = 0x6674'6c61'6231ULL;
};

/// Newline-delimited JSON request handler. Each request
///
///   {"cmd": ..., "session": token?, "payload": {...}, "id": any?}
///
/// yields exactly one response {"ok": true, "payload": {...}} or
/// {"ok": false, "error": {"code", "message"}}; "id" is echoed when given.
/// Safe to call from several connection threads; requests on one session are
/// processed one at a time.
class Server {
 public:
  explicit Server(ServerOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::string handle_line(std::string_view line);
  Json handle(const Json& request);

  /// Reads requests line by line until EOF, writing one response line each.
  void serve(std::istream& in, std::ostream& out);

  std::size_t session_count() const;
  const ServerOptions& options() const noexcept { return options_; }

 private:
  struct Session;

  Json dispatch(const std::string& cmd, const Json& request);
  Json hello() const;
  Json reset(const Json& payload);
  Json step(const std::string& token, const Json& payload);
  Json close(const std::string& token);
  Json analyze(const Json& payload) const;
  Json generate_tree(const Json& payload) const;
  std::shared_ptr<Session> find_session(const std::string& token) const;

  ServerOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  PortableRng tokens_;
};

/// Accepts TCP connections on 127.0.0.1 and feeds each one to a Server on
/// its own thread.
class TcpServer {
 public:
  /// Binds immediately; port 0 picks an ephemeral port.
  TcpServer(Server& server, std::uint16_t port);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  /// Accept loop; returns after stop().
  void run();
  void stop();

 private:
  void serve_connection(int fd);

  Server& server_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex mutex_;
  std::vector<std::thread> workers_;
  std::vector<int> client_fds_;
};

}  // namespace ftlab
