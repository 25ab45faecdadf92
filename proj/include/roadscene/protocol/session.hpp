#pragma once

#include <cstddef>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roadscene/io.hpp"
#include "roadscene/protocol/codec.hpp"
#include "roadscene/protocol/message.hpp"
#include "roadscene/tiles/tile_grid.hpp"

namespace roadscene::protocol {

/// Server-side mirror of the instantiated scene.
struct SceneState {
  std::optional<Hello> hello;  // empty until a session starts
  tiles::TileGrid grid;
  std::vector<Spawn> agents;
  std::size_t tiles_received = 0;
  bool committed = false;
  std::optional<Commit> commit;
};

/// Dump format: the tile-grid JSON plus tile size, scene id and agents.
inline io::Json dump_json(const SceneState& state) {
  io::Json j = tiles::to_json(state.grid);
  j["tile_size"] = state.hello ? state.hello->tile_size : 1.0;
  j["scene_id"] = state.commit ? state.commit->scene_id : std::string();
  io::Json agents = io::Json::array();
  for (const auto& a : state.agents) agents.push_back({{"kind", a.kind}, {"x", a.x}, {"y", a.y}, {"heading", a.heading}});
  j["agents"] = std::move(agents);
  return j;
}

/// Applies messages in arrival order. Every message gets an Ack; a rejected
/// message leaves the state exactly as it was.
class SceneSession {
 public:
  explicit SceneSession(std::filesystem::path dump_path = {}) : dump_path_(std::move(dump_path)) {}

  const SceneState& state() const noexcept { return state_; }
  const std::filesystem::path& dump_path() const noexcept { return dump_path_; }

  Ack apply(const SceneMessage& message) {
    return std::visit([this](const auto& m) { return on(m); }, message);
  }

  /// Decodes and applies one frame; never throws.
  Ack handle_frame(std::string_view bytes) noexcept {
    try {
      return apply(decode(bytes));
    } catch (const std::exception& e) {
      return error_ack("frame", e.what());
    } catch (...) {
      return error_ack("frame", "unexpected failure");
    }
  }

 private:
  Ack on(const Hello& m) {
    SceneState fresh;
    fresh.hello = m;
    fresh.grid = tiles::TileGrid(static_cast<std::size_t>(m.grid_width), static_cast<std::size_t>(m.grid_height));
    state_ = std::move(fresh);
    return ok_ack("hello", "session " + std::to_string(m.grid_width) + "x" + std::to_string(m.grid_height));
  }

  Ack on(const Tile& m) {
    if (!state_.hello) return error_ack("tile", "no session");
    if (state_.committed) return error_ack("tile", "scene committed");
    if (m.x >= state_.hello->grid_width || m.y >= state_.hello->grid_height) {
      return error_ack("tile", "tile out of bounds");
    }
    state_.grid.at(static_cast<std::size_t>(m.x), static_cast<std::size_t>(m.y)) = static_cast<int>(m.code);
    ++state_.tiles_received;
    return ok_ack("tile");
  }

  Ack on(const Spawn& m) {
    if (!state_.hello) return error_ack("spawn", "no session");
    if (state_.committed) return error_ack("spawn", "scene committed");
    state_.agents.push_back(m);
    return ok_ack("spawn");
  }

  Ack on(const Clear&) {
    if (state_.hello) {
      state_.grid = tiles::TileGrid(state_.grid.width, state_.grid.height);
      state_.agents.clear();
      state_.tiles_received = 0;
      state_.committed = false;
      state_.commit.reset();
    }
    return ok_ack("clear", "cleared");
  }

  Ack on(const Commit& m) {
    if (!state_.hello) return error_ack("commit", "no session");
    if (state_.committed) {
      if (state_.commit && *state_.commit == m) return ok_ack("commit", "already committed");
      return error_ack("commit", "scene committed");
    }
    if (m.tile_count && static_cast<std::size_t>(*m.tile_count) != state_.tiles_received) {
      return error_ack("commit", "tile count mismatch");
    }
    SceneState next = state_;
    next.committed = true;
    next.commit = m;
    if (!dump_path_.empty()) {
      try {
        io::write_json(dump_path_, dump_json(next));
      } catch (const std::exception& e) {
        return error_ack("commit", std::string("dump failed: ") + e.what());
      }
    }
    state_ = std::move(next);
    return ok_ack("commit", "committed " + std::to_string(state_.tiles_received) + " tiles");
  }

  Ack on(const Ack&) { return error_ack("ack", "unexpected ack"); }

  std::filesystem::path dump_path_;
  SceneState state_;
};

}  // namespace roadscene::protocol
