#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>

#include "modglue/fileserver/store.hpp"
#include "modglue/runtime.hpp"

namespace modglue::fileserver {

/// One accepted client connection.
class Connection {
 public:
  virtual ~Connection() = default;
  /// Reads up to '\n' (stripped, as is a trailing '\r'). Empty optional on
  /// EOF, timeout, or when the line exceeds `max_len`.
  virtual std::optional<std::string> read_line(std::size_t max_len = 8192) = 0;
  virtual std::optional<std::string> read_exact(std::size_t n) = 0;
  virtual void write(std::string_view bytes) = 0;
};

using ConnectionHandler = std::function<void(Connection&)>;

struct Reply {
  enum class Status { Ok, NotFound, Error };
  Status status = Status::Ok;
  std::string body;
};

/// Callback receiving one request (a path) and producing the reply.
using RequestHandler = std::function<Reply(const std::string& request)>;

class Network : public DeviceHandle {
 public:
  /// Sequential accept loop handing raw connections to `handler`; each
  /// connection is closed after the handler returns. Runs until `stop`.
  virtual void serve(const ConnectionHandler& handler, std::stop_token stop) = 0;

  /// Interprets connections with this stack's protocol and answers every
  /// request through `handler`.
  virtual void listen(const RequestHandler& handler, std::stop_token stop) = 0;
};

/// Raw TCP: one request line in, the reply body out, then close.
class TcpipNetwork : public Network {
 public:
  /// Binds and listens immediately. Throws std::runtime_error when the port
  /// is outside [1, 65535] or cannot be bound.
  explicit TcpipNetwork(std::int64_t port);
  ~TcpipNetwork() override;

  TcpipNetwork(const TcpipNetwork&) = delete;
  TcpipNetwork& operator=(const TcpipNetwork&) = delete;

  std::uint16_t port() const { return port_; }

  void serve(const ConnectionHandler& handler, std::stop_token stop) override;
  void listen(const RequestHandler& handler, std::stop_token stop) override;

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Minimal HTTP/1.1 over an inner network: GET only, Content-Length
/// framing, no keep-alive.
class HttpNetwork : public Network {
 public:
  explicit HttpNetwork(std::shared_ptr<Network> inner) : inner_(std::move(inner)) {}

  const std::shared_ptr<Network>& inner() const { return inner_; }

  void serve(const ConnectionHandler& handler, std::stop_token stop) override { inner_->serve(handler, stop); }
  void listen(const RequestHandler& handler, std::stop_token stop) override;

  /// Handles one connection: parses the request, calls `handler` with the
  /// path, writes the response. Malformed requests get a 400.
  static void handle(Connection& conn, const RequestHandler& handler);

 private:
  std::shared_ptr<Network> inner_;
};

/// A store fed over the network, initially empty. Connections on its network
/// carry either `PUT <name> <size>\n<bytes>` (answered `OK`) or a name to
/// read back.
class NetStore : public Store {
 public:
  /// Starts serving `net` on a background thread until destruction or `stop`.
  NetStore(std::shared_ptr<Network> net, std::stop_token stop);
  ~NetStore() override;

  ReadResult read(std::string_view name) const override;
  void put(std::string name, std::string content);

  /// Protocol handler for one connection.
  void handle(Connection& conn);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string, std::less<>> files_;
  std::shared_ptr<Network> net_;
  std::jthread worker_;
};

/// The application job: answers each request by reading the store.
class FileServer : public Job {
 public:
  FileServer(std::shared_ptr<Store> store, std::shared_ptr<Network> net)
      : store_(std::move(store)), net_(std::move(net)) {}

  void start(std::stop_token stop) override;

  /// Leading '/' is stripped; the empty path reads `index.html`.
  Reply answer(const std::string& request) const;

  const std::shared_ptr<Store>& store() const { return store_; }
  const std::shared_ptr<Network>& network() const { return net_; }

 private:
  std::shared_ptr<Store> store_;
  std::shared_ptr<Network> net_;
};

}  // namespace modglue::fileserver
