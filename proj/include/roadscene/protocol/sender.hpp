#pragma once

#include <fcntl.h>
#include <poll.h>
#include <sys/socket.h>

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "roadscene/protocol/codec.hpp"
#include "roadscene/protocol/socket.hpp"
#include "roadscene/tiles/tile_grid.hpp"

namespace roadscene::protocol {

/// The server answered with an error Ack.
class NackReceived : public Error {
 public:
  explicit NackReceived(Ack ack)
      : Error(ErrorCode::nack_received, ack.ref + ": " + ack.detail), ack_(std::move(ack)) {}
  const Ack& ack() const noexcept { return ack_; }

 private:
  Ack ack_;
};

struct SendOptions {
  double tile_size = 1.0;
  std::string scene_id = "scene";
  int timeout_ms = 5000;
  // Test hook: probability of silently skipping each Tile datagram. The
  // Commit still counts every tile, so any loss is reported by the server.
  double drop_rate = 0.0;
  std::uint64_t seed = 0;
};

struct SendSummary {
  std::size_t tiles_sent = 0;  // tiles the sender intended to deliver
  std::size_t spawns_sent = 0;
  Ack final_ack;
};

/// Hello, one Tile per road cell in row-major order, the spawns, then Commit.
inline std::vector<SceneMessage> scene_messages(const tiles::TileGrid& grid, const std::vector<Spawn>& spawns,
                                                const SendOptions& options, bool with_checksum) {
  std::vector<SceneMessage> out;
  out.push_back(Hello{kProtocolVersion, static_cast<std::int64_t>(grid.width),
                      static_cast<std::int64_t>(grid.height), options.tile_size});
  std::int64_t tiles = 0;
  for (std::size_t y = 0; y < grid.height; ++y) {
    for (std::size_t x = 0; x < grid.width; ++x) {
      const int code = grid.at(x, y);
      if (code == tiles::kEmpty) continue;
      out.push_back(Tile{static_cast<std::int64_t>(x), static_cast<std::int64_t>(y), code});
      ++tiles;
    }
  }
  for (const auto& s : spawns) out.push_back(s);
  Commit commit{options.scene_id, std::nullopt};
  if (with_checksum) commit.tile_count = tiles;
  out.push_back(commit);
  for (const auto& m : out) validate(m);
  return out;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left > 0 ? static_cast<int>(left) : 0;
}

inline Fd connect_to(const Endpoint& endpoint, Transport transport) {
  Fd fd = open_socket(transport);
  const sockaddr_in addr = resolve(endpoint);
  if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    if (errno == ECONNREFUSED) fail(ErrorCode::connection_refused, "connection refused by " + endpoint.str());
    fail(ErrorCode::io, "connect to " + endpoint.str() + ": " + errno_text());
  }
  return fd;
}

inline Ack parse_ack(std::string_view frame) {
  auto message = decode(frame);
  const Ack* ack = std::get_if<Ack>(&message);
  if (ack == nullptr) fail(ErrorCode::malformed_frame, "server replied with a non-ack message");
  return *ack;
}

// Writes all frames while reading replies, expecting one Ack per frame.
inline Ack send_stream(int fd, const std::vector<SceneMessage>& messages, int timeout_ms) {
  std::string out;
  for (const auto& m : messages) out += encode(m, Framing::stream);
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
  std::size_t written = 0;
  std::size_t acks = 0;
  std::string in;
  Ack last;
  while (acks < messages.size()) {
    pollfd p{fd, static_cast<short>(POLLIN | (written < out.size() ? POLLOUT : 0)), 0};
    const int wait = remaining_ms(deadline);
    if (wait == 0 || ::poll(&p, 1, wait) == 0) {
      fail(ErrorCode::timeout, "timed out after " + std::to_string(acks) + " of " + std::to_string(messages.size()) +
                                   " acknowledgements");
    }
    if (p.revents & POLLOUT) {
      const auto n = ::send(fd, out.data() + written, out.size() - written, MSG_NOSIGNAL | MSG_DONTWAIT);
      if (n < 0 && errno != EAGAIN && errno != EINTR) fail(ErrorCode::io, "send: " + errno_text());
      if (n > 0) written += static_cast<std::size_t>(n);
    }
    if (p.revents & (POLLIN | POLLHUP | POLLERR)) {
      char chunk[4096];
      const auto n = ::recv(fd, chunk, sizeof chunk, MSG_DONTWAIT);
      if (n == 0) fail(ErrorCode::io, "server closed the connection");
      if (n < 0 && errno != EAGAIN && errno != EINTR) fail(ErrorCode::io, "recv: " + errno_text());
      if (n > 0) in.append(chunk, static_cast<std::size_t>(n));
      for (auto nl = in.find('\n'); nl != std::string::npos; nl = in.find('\n')) {
        last = parse_ack(std::string_view(in).substr(0, nl));
        in.erase(0, nl + 1);
        ++acks;
        if (!last.ok()) throw NackReceived(last);
      }
    }
  }
  return last;
}

// Returns false when nothing is pending; throws on error acks.
inline bool drain_datagram(int fd, Ack* commit_ack) {
  char buffer[2048];
  const auto n = ::recv(fd, buffer, sizeof buffer, MSG_DONTWAIT);
  if (n < 0) {
    if (errno == ECONNREFUSED) fail(ErrorCode::connection_refused, "datagram peer refused delivery");
    return false;
  }
  const Ack ack = parse_ack(std::string_view(buffer, static_cast<std::size_t>(n)));
  if (!ack.ok()) throw NackReceived(ack);
  if (ack.ref == "commit" && commit_ack != nullptr) *commit_ack = ack;
  return true;
}

inline Ack send_datagram(int fd, const std::vector<SceneMessage>& messages, const SendOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::size_t count = 0;
  for (const auto& m : messages) {
    if (std::holds_alternative<Tile>(m) && options.drop_rate > 0.0 && coin(rng) < options.drop_rate) continue;
    const std::string frame = encode(m, Framing::datagram);
    if (::send(fd, frame.data(), frame.size(), 0) < 0) {
      if (errno == ECONNREFUSED) fail(ErrorCode::connection_refused, "datagram peer refused delivery");
      fail(ErrorCode::io, "send: " + errno_text());
    }
    // Pace the burst so a loopback receiver keeps up, and surface early errors.
    if (++count % 32 == 0) {
      while (drain_datagram(fd, nullptr)) {
      }
      std::this_thread::sleep_for(std::chrono::microseconds(200));
    }
  }
  const auto deadline = Clock::now() + std::chrono::milliseconds(options.timeout_ms);
  Ack commit_ack;
  commit_ack.ref.clear();
  while (commit_ack.ref != "commit") {
    pollfd p{fd, POLLIN, 0};
    const int wait = remaining_ms(deadline);
    if (wait == 0 || ::poll(&p, 1, wait) == 0) fail(ErrorCode::timeout, "no acknowledgement for commit");
    drain_datagram(fd, &commit_ack);
  }
  return commit_ack;
}

}  // namespace detail

/// Streams a tile grid and agent spawns to a scene server. Over datagrams
/// the Commit carries the number of tiles sent so the server can detect loss.
inline SendSummary send_scene(const tiles::TileGrid& grid, const std::vector<Spawn>& spawns, const Endpoint& endpoint,
                              Transport transport, const SendOptions& options = {}) {
  require(grid.width > 0 && grid.height > 0 && grid.cells.size() == grid.width * grid.height,
          ErrorCode::invalid_argument, "tile grid is malformed");
  require(options.drop_rate >= 0.0 && options.drop_rate <= 1.0, ErrorCode::invalid_argument,
          "drop_rate must lie in [0, 1]");
  require(options.timeout_ms > 0, ErrorCode::invalid_argument, "timeout must be positive");
  const auto messages = scene_messages(grid, spawns, options, transport == Transport::datagram);
  Fd fd = detail::connect_to(endpoint, transport);

  SendSummary summary;
  summary.tiles_sent = grid.road_count();
  summary.spawns_sent = spawns.size();
  summary.final_ack = transport == Transport::stream ? detail::send_stream(fd.get(), messages, options.timeout_ms)
                                                     : detail::send_datagram(fd.get(), messages, options);
  return summary;
}

}  // namespace roadscene::protocol
