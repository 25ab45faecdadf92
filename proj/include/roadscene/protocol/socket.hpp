#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <utility>

#include "roadscene/error.hpp"
#include "roadscene/protocol/message.hpp"

namespace roadscene::protocol {

enum class Transport { stream, datagram };

inline const char* to_string(Transport t) noexcept { return t == Transport::stream ? "stream" : "datagram"; }

inline Transport parse_transport(std::string_view s) {
  if (s == "stream" || s == "tcp") return Transport::stream;
  if (s == "datagram" || s == "udp") return Transport::datagram;
  fail(ErrorCode::invalid_argument, "unknown transport '" + std::string(s) + "' (expected stream or datagram)");
}

/// Owning file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) noexcept : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;

  std::string str() const { return host + ":" + std::to_string(port); }
};

/// Accepts "host:port", ":port", "port" or "host".
inline Endpoint parse_endpoint(std::string_view text) {
  Endpoint ep;
  std::string_view port_text;
  const auto colon = text.rfind(':');
  if (colon != std::string_view::npos) {
    if (colon > 0) ep.host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  } else if (!text.empty() && text.find_first_not_of("0123456789") == std::string_view::npos) {
    port_text = text;
  } else if (!text.empty()) {
    ep.host = std::string(text);
  }
  if (!port_text.empty()) {
    unsigned value = 0;
    const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
    require(ec == std::errc() && end == port_text.data() + port_text.size() && value <= 65535,
            ErrorCode::invalid_argument, "bad port in endpoint '" + std::string(text) + "'");
    ep.port = static_cast<std::uint16_t>(value);
  }
  return ep;
}

inline sockaddr_in resolve(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  addrinfo* result = nullptr;
  const int rc = ::getaddrinfo(ep.host.c_str(), nullptr, &hints, &result);
  if (rc != 0 || result == nullptr) {
    fail(ErrorCode::invalid_argument, "cannot resolve host '" + ep.host + "': " + ::gai_strerror(rc));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, result->ai_addr, sizeof addr);
  ::freeaddrinfo(result);
  addr.sin_port = htons(ep.port);
  return addr;
}

inline std::string errno_text() { return std::strerror(errno); }

inline Fd open_socket(Transport transport) {
  Fd fd(::socket(AF_INET, transport == Transport::stream ? SOCK_STREAM : SOCK_DGRAM, 0));
  if (!fd) fail(ErrorCode::io, "socket: " + errno_text());
  return fd;
}

}  // namespace roadscene::protocol
