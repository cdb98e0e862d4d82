#include "modglue/fileserver/network.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace modglue::fileserver {

namespace {

constexpr int kPollMillis = 50;
constexpr int kClientTimeoutSeconds = 5;

class SocketConnection : public Connection {
 public:
  explicit SocketConnection(int fd) : fd_(fd) {
    timeval tv{kClientTimeoutSeconds, 0};
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  }
  ~SocketConnection() override { ::close(fd_); }

  SocketConnection(const SocketConnection&) = delete;
  SocketConnection& operator=(const SocketConnection&) = delete;

  std::optional<std::string> read_line(std::size_t max_len) override {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        auto line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (buffer_.size() > max_len || !fill()) return std::nullopt;
    }
  }

  std::optional<std::string> read_exact(std::size_t n) override {
    while (buffer_.size() < n) {
      if (!fill()) return std::nullopt;
    }
    auto out = buffer_.substr(0, n);
    buffer_.erase(0, n);
    return out;
  }

  void write(std::string_view bytes) override {
    while (!bytes.empty()) {
      auto n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return;
      bytes.remove_prefix(static_cast<std::size_t>(n));
    }
  }

 private:
  bool fill() {
    char buf[4096];
    for (;;) {
      auto n = ::recv(fd_, buf, sizeof buf, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      buffer_.append(buf, static_cast<std::size_t>(n));
      return true;
    }
  }

  int fd_;
  std::string buffer_;
};

std::string status_line(Reply::Status s) {
  switch (s) {
    case Reply::Status::Ok: return "200 OK";
    case Reply::Status::NotFound: return "404 Not Found";
    case Reply::Status::Error: return "500 Internal Server Error";
  }
  return "500 Internal Server Error";
}

void write_http(Connection& conn, const std::string& status, const std::string& body) {
  std::ostringstream os;
  os << "HTTP/1.1 " << status << "\r\n"
     << "Content-Length: " << body.size() << "\r\n"
     << "Content-Type: application/octet-stream\r\n"
     << "Connection: close\r\n\r\n"
     << body;
  conn.write(os.str());
}

}  // namespace

// ---------------------------------------------------------------------------
// TCPIP

TcpipNetwork::TcpipNetwork(std::int64_t port) {
  if (port < 1 || port > 65535) throw std::runtime_error("port " + std::to_string(port) + " is out of range");
  port_ = static_cast<std::uint16_t>(port);
  fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port_);
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 64) != 0) {
    auto err = std::string(std::strerror(errno));
    ::close(fd_);
    throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + err);
  }
}

TcpipNetwork::~TcpipNetwork() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpipNetwork::serve(const ConnectionHandler& handler, std::stop_token stop) {
  while (!stop.stop_requested()) {
    pollfd p{fd_, POLLIN, 0};
    int ready = ::poll(&p, 1, kPollMillis);
    if (ready < 0 && errno != EINTR) throw std::runtime_error(std::string("poll: ") + std::strerror(errno));
    if (ready <= 0) continue;
    int client = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (client < 0) continue;
    SocketConnection conn(client);
    handler(conn);
  }
}

void TcpipNetwork::listen(const RequestHandler& handler, std::stop_token stop) {
  serve(
      [&handler](Connection& conn) {
        auto line = conn.read_line();
        if (!line) return;
        conn.write(handler(*line).body);
      },
      stop);
}

// ---------------------------------------------------------------------------
// HTTP

void HttpNetwork::handle(Connection& conn, const RequestHandler& handler) {
  auto request_line = conn.read_line();
  if (!request_line) return;

  std::istringstream is(*request_line);
  std::string method, target, version, extra;
  is >> method >> target >> version;
  bool well_formed = !method.empty() && !target.empty() && version.rfind("HTTP/1.", 0) == 0 && !(is >> extra);

  // Drain headers up to the blank line.
  for (;;) {
    auto header = conn.read_line();
    if (!header) {
      well_formed = false;
      break;
    }
    if (header->empty()) break;
    if (header->find(':') == std::string::npos) well_formed = false;
  }

  if (!well_formed || target.front() != '/') {
    write_http(conn, "400 Bad Request", "Bad Request\n");
    return;
  }
  if (method != "GET") {
    write_http(conn, "405 Method Not Allowed", "Method Not Allowed\n");
    return;
  }
  auto path = target.substr(0, target.find('?'));
  auto reply = handler(path);
  write_http(conn, status_line(reply.status), reply.body);
}

void HttpNetwork::listen(const RequestHandler& handler, std::stop_token stop) {
  inner_->serve([&handler](Connection& conn) { handle(conn, handler); }, stop);
}

// ---------------------------------------------------------------------------
// NetStore

NetStore::NetStore(std::shared_ptr<Network> net, std::stop_token stop) : net_(std::move(net)) {
  worker_ = std::jthread([this, outer = std::move(stop)](std::stop_token own) {
    std::stop_source combined;
    std::stop_callback on_outer(outer, [&combined] { combined.request_stop(); });
    std::stop_callback on_own(own, [&combined] { combined.request_stop(); });
    net_->serve([this](Connection& conn) { handle(conn); }, combined.get_token());
  });
}

NetStore::~NetStore() {
  worker_.request_stop();
  if (worker_.joinable()) worker_.join();
}

ReadResult NetStore::read(std::string_view name) const {
  std::lock_guard lock(mutex_);
  auto it = files_.find(name);
  if (it == files_.end()) return StoreError::unknown_file(std::string(name));
  return it->second;
}

void NetStore::put(std::string name, std::string content) {
  std::lock_guard lock(mutex_);
  files_.insert_or_assign(std::move(name), std::move(content));
}

void NetStore::handle(Connection& conn) {
  auto line = conn.read_line();
  if (!line) return;
  if (line->rfind("PUT ", 0) == 0) {
    std::istringstream is(line->substr(4));
    std::string name;
    std::size_t size = 0;
    if (!(is >> name >> size) || !is_safe_relative_path(name)) {
      conn.write("ERROR malformed PUT\n");
      return;
    }
    auto bytes = conn.read_exact(size);
    if (!bytes) {
      conn.write("ERROR short upload\n");
      return;
    }
    put(std::move(name), std::move(*bytes));
    conn.write("OK\n");
    return;
  }
  auto r = read(*line);
  conn.write(r.ok() ? r.value() : r.error().pp() + "\n");
}

// ---------------------------------------------------------------------------
// Server

Reply FileServer::answer(const std::string& request) const {
  std::string_view name = request;
  while (!name.empty() && name.front() == '/') name.remove_prefix(1);
  if (name.empty()) name = "index.html";
  auto r = store_->read(name);
  if (r.ok()) return Reply{Reply::Status::Ok, r.value()};
  auto status = r.error().as_unknown_file() ? Reply::Status::NotFound : Reply::Status::Error;
  return Reply{status, r.error().pp() + "\n"};
}

void FileServer::start(std::stop_token stop) {
  net_->listen([this](const std::string& request) { return answer(request); }, stop);
}

}  // namespace modglue::fileserver
