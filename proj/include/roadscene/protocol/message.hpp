#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "roadscene/error.hpp"

namespace roadscene::protocol {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 7777;
inline constexpr std::int64_t kMaxGridSide = 16384;
inline constexpr std::int64_t kMaxGridCells = std::int64_t{1} << 24;
inline constexpr std::size_t kMaxTextField = 256;

struct Hello {
  std::int64_t protocol_version = kProtocolVersion;
  std::int64_t grid_width = 0;
  std::int64_t grid_height = 0;
  double tile_size = 1.0;  // world units per cell
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct Tile {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t code = 0;
  friend bool operator==(const Tile&, const Tile&) = default;
};

struct Spawn {
  std::string kind;  // e.g. "car"
  double x = 0.0;    // world units
  double y = 0.0;
  double heading = 0.0;  // radians
  friend bool operator==(const Spawn&, const Spawn&) = default;
};

struct Clear {
  friend bool operator==(const Clear&, const Clear&) = default;
};

struct Commit {
  std::string scene_id;
  std::optional<std::int64_t> tile_count;  // tiles the sender emitted; checked by the server when present
  friend bool operator==(const Commit&, const Commit&) = default;
};

struct Ack {
  std::string status = "ok";  // "ok" | "error"
  std::string detail;
  std::string ref;  // type of the acknowledged message, or "frame" for undecodable input
  bool ok() const noexcept { return status == "ok"; }
  friend bool operator==(const Ack&, const Ack&) = default;
};

using SceneMessage = std::variant<Hello, Tile, Spawn, Clear, Commit, Ack>;

inline const char* type_name(const SceneMessage& m) noexcept {
  constexpr const char* names[] = {"hello", "tile", "spawn", "clear", "commit", "ack"};
  return names[m.index()];
}

namespace detail {

inline void check(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::field_out_of_range, what);
}

inline bool is_identifier(const std::string& s) {
  if (s.empty() || s.size() > kMaxTextField) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

}  // namespace detail

/// Field-range validation shared by encoder and decoder.
inline void validate(const SceneMessage& message) {
  using detail::check;
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Hello>) {
          check(m.protocol_version == kProtocolVersion, "unsupported protocol_version " + std::to_string(m.protocol_version));
          check(m.grid_width >= 1 && m.grid_width <= kMaxGridSide, "grid_width out of range");
          check(m.grid_height >= 1 && m.grid_height <= kMaxGridSide, "grid_height out of range");
          check(m.grid_width * m.grid_height <= kMaxGridCells, "grid too large");
          check(std::isfinite(m.tile_size) && m.tile_size > 0.0, "tile_size must be positive");
        } else if constexpr (std::is_same_v<T, Tile>) {
          check(m.x >= 0 && m.x < kMaxGridSide && m.y >= 0 && m.y < kMaxGridSide, "tile index out of range");
          check(m.code >= 0 && m.code <= 15, "tile code out of range");
        } else if constexpr (std::is_same_v<T, Spawn>) {
          check(detail::is_identifier(m.kind), "spawn kind must be an identifier");
          check(std::isfinite(m.x) && std::isfinite(m.y) && std::isfinite(m.heading), "spawn pose must be finite");
        } else if constexpr (std::is_same_v<T, Commit>) {
          check(!m.scene_id.empty() && m.scene_id.size() <= kMaxTextField, "scene_id must be 1..256 bytes");
          check(!m.tile_count || (*m.tile_count >= 0 && *m.tile_count <= kMaxGridCells), "tile_count out of range");
        } else if constexpr (std::is_same_v<T, Ack>) {
          check(m.status == "ok" || m.status == "error", "ack status must be ok or error");
        }
      },
      message);
}

inline Ack ok_ack(std::string ref, std::string detail = "") { return {"ok", std::move(detail), std::move(ref)}; }
inline Ack error_ack(std::string ref, std::string detail) { return {"error", std::move(detail), std::move(ref)}; }

}  // namespace roadscene::protocol
