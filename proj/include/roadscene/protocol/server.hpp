#pragma once

#include <poll.h>
#include <sys/socket.h>

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "roadscene/protocol/codec.hpp"
#include "roadscene/protocol/session.hpp"
#include "roadscene/protocol/socket.hpp"

namespace roadscene::protocol {

inline constexpr std::size_t kMaxFrameBytes = 64 * 1024;

struct ServeOptions {
  Endpoint listen{"127.0.0.1", kDefaultPort};
  Transport transport = Transport::stream;
  std::filesystem::path dump_path;
  int poll_interval_ms = 50;  // how often run() checks for stop()
};

/// Headless scene receiver. The socket is bound on construction, so port 0
/// picks a free port readable through port(). run() serves one client
/// connection (stream) or datagram source at a time until stop() is called.
class SceneServer {
 public:
  explicit SceneServer(ServeOptions options) : options_(std::move(options)), session_(options_.dump_path) {
    socket_ = open_socket(options_.transport);
    const int one = 1;
    ::setsockopt(socket_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (options_.transport == Transport::datagram) {
      const int buffer = 4 * 1024 * 1024;
      ::setsockopt(socket_.get(), SOL_SOCKET, SO_RCVBUF, &buffer, sizeof buffer);
    }
    const sockaddr_in addr = resolve(options_.listen);
    if (::bind(socket_.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
      fail(ErrorCode::io, "cannot bind " + options_.listen.str() + ": " + errno_text());
    }
    if (options_.transport == Transport::stream && ::listen(socket_.get(), 8) != 0) {
      fail(ErrorCode::io, "listen: " + errno_text());
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(socket_.get(), reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
  }

  std::uint16_t port() const noexcept { return port_; }
  Endpoint endpoint() const { return {options_.listen.host, port_}; }
  const ServeOptions& options() const noexcept { return options_; }

  void stop() noexcept { stopping_ = true; }

  SceneState snapshot() const {
    std::lock_guard lock(mutex_);
    return session_.state();
  }

  void run() {
    if (options_.transport == Transport::stream) {
      run_stream();
    } else {
      run_datagram();
    }
  }

 private:
  Ack apply(std::string_view frame) {
    std::lock_guard lock(mutex_);
    return session_.handle_frame(frame);
  }

  bool wait_readable(int fd) const {
    pollfd p{fd, POLLIN, 0};
    return ::poll(&p, 1, options_.poll_interval_ms) > 0;
  }

  static bool send_all(int fd, const std::string& bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      const auto n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  void run_stream() {
    while (!stopping_) {
      if (!wait_readable(socket_.get())) continue;
      Fd client(::accept(socket_.get(), nullptr, nullptr));
      if (client) serve_connection(client.get());
    }
  }

  void serve_connection(int fd) {
    std::string buffer;
    char chunk[4096];
    bool discarding = false;  // inside an oversized line
    while (!stopping_) {
      if (!wait_readable(fd)) continue;
      const auto n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n == 0) return;
      if (n < 0) {
        if (errno == EINTR) continue;
        return;
      }
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (auto nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n', start)) {
        const std::string_view line(buffer.data() + start, nl - start);
        start = nl + 1;
        if (discarding) {
          discarding = false;
          continue;
        }
        if (line.empty() || line == "\r") continue;
        if (!send_all(fd, encode(apply(line)))) return;
      }
      buffer.erase(0, start);
      if (buffer.size() > kMaxFrameBytes) {
        buffer.clear();
        if (!discarding && !send_all(fd, encode(error_ack("frame", "frame too large")))) return;
        discarding = true;
      }
    }
  }

  // Datagram peers get replies only for Commit and for errors, so a sender
  // streaming thousands of tiles is not flooded with acknowledgements.
  void run_datagram() {
    std::vector<char> buffer(kMaxFrameBytes);
    while (!stopping_) {
      if (!wait_readable(socket_.get())) continue;
      sockaddr_in peer{};
      socklen_t len = sizeof peer;
      const auto n =
          ::recvfrom(socket_.get(), buffer.data(), buffer.size(), 0, reinterpret_cast<sockaddr*>(&peer), &len);
      if (n < 0) continue;
      const Ack ack = apply(std::string_view(buffer.data(), static_cast<std::size_t>(n)));
      if (ack.ok() && ack.ref != "commit") continue;
      const std::string reply = encode(ack, Framing::datagram);
      ::sendto(socket_.get(), reply.data(), reply.size(), 0, reinterpret_cast<const sockaddr*>(&peer), len);
    }
  }

  ServeOptions options_;
  Fd socket_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  mutable std::mutex mutex_;
  SceneSession session_;
};

}  // namespace roadscene::protocol
