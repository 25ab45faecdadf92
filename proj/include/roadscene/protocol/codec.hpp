#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>

#include "roadscene/error.hpp"
#include "roadscene/io.hpp"
#include "roadscene/protocol/message.hpp"

namespace roadscene::protocol {

enum class Framing {
  stream,    // newline-terminated
  datagram,  // one object per datagram, no terminator
};

/// Single-line JSON object whose "type" field names the variant.
inline std::string encode(const SceneMessage& message, Framing framing = Framing::stream) {
  validate(message);
  io::Json j = {{"type", type_name(message)}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Hello>) {
          j["protocol_version"] = m.protocol_version;
          j["grid_width"] = m.grid_width;
          j["grid_height"] = m.grid_height;
          j["tile_size"] = m.tile_size;
        } else if constexpr (std::is_same_v<T, Tile>) {
          j["x"] = m.x;
          j["y"] = m.y;
          j["code"] = m.code;
        } else if constexpr (std::is_same_v<T, Spawn>) {
          j["kind"] = m.kind;
          j["x"] = m.x;
          j["y"] = m.y;
          j["heading"] = m.heading;
        } else if constexpr (std::is_same_v<T, Commit>) {
          j["scene_id"] = m.scene_id;
          if (m.tile_count) j["tile_count"] = *m.tile_count;
        } else if constexpr (std::is_same_v<T, Ack>) {
          j["status"] = m.status;
          j["detail"] = m.detail;
          j["ref"] = m.ref;
        }
      },
      message);
  std::string out = j.dump(-1, ' ', false, io::Json::error_handler_t::replace);
  if (framing == Framing::stream) out += '\n';
  return out;
}

namespace detail {

class FieldReader {
 public:
  explicit FieldReader(const io::Json& j) : j_(j) {}

  std::int64_t integer(const char* key) {
    const auto& v = field(key);
    check(v.is_number_integer(), std::string(key) + " must be an integer");
    if (v.is_number_unsigned()) {
      check(v.get<std::uint64_t>() <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()),
            std::string(key) + " out of range");
    }
    return v.get<std::int64_t>();
  }

  double real(const char* key) {
    const auto& v = field(key);
    check(v.is_number(), std::string(key) + " must be a number");
    return v.get<double>();
  }

  std::string text(const char* key) {
    const auto& v = field(key);
    check(v.is_string(), std::string(key) + " must be a string");
    auto s = v.get<std::string>();
    check(s.size() <= kMaxTextField * 16, std::string(key) + " too long");
    return s;
  }

  bool has(const char* key) const { return j_.contains(key); }

  /// Rejects any field outside `allowed` (besides "type").
  void only(std::initializer_list<const char*> allowed) const {
    for (const auto& item : j_.items()) {
      if (item.key() == "type") continue;
      bool known = false;
      for (const char* a : allowed) known = known || item.key() == a;
      check(known, "unexpected field '" + item.key() + "'");
    }
  }

 private:
  const io::Json& field(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) fail(ErrorCode::field_out_of_range, std::string("missing field '") + key + "'");
    return *it;
  }

  const io::Json& j_;
};

}  // namespace detail

/// Parses one framed message. A single trailing newline is accepted.
inline SceneMessage decode(std::string_view bytes) {
  if (!bytes.empty() && bytes.back() == '\n') bytes.remove_suffix(1);
  if (!bytes.empty() && bytes.back() == '\r') bytes.remove_suffix(1);
  if (bytes.find('\n') != std::string_view::npos) fail(ErrorCode::malformed_frame, "frame spans several lines");
  const auto j = io::Json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::malformed_frame, "frame is not valid JSON");
  if (!j.is_object()) fail(ErrorCode::malformed_frame, "frame is not a JSON object");
  auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) fail(ErrorCode::malformed_frame, "frame has no type");
  const std::string type = type_it->get<std::string>();

  detail::FieldReader r(j);
  SceneMessage message;
  if (type == "hello") {
    r.only({"protocol_version", "grid_width", "grid_height", "tile_size"});
    message = Hello{r.integer("protocol_version"), r.integer("grid_width"), r.integer("grid_height"),
                    r.real("tile_size")};
  } else if (type == "tile") {
    r.only({"x", "y", "code"});
    message = Tile{r.integer("x"), r.integer("y"), r.integer("code")};
  } else if (type == "spawn") {
    r.only({"kind", "x", "y", "heading"});
    message = Spawn{r.text("kind"), r.real("x"), r.real("y"), r.real("heading")};
  } else if (type == "clear") {
    r.only({});
    message = Clear{};
  } else if (type == "commit") {
    r.only({"scene_id", "tile_count"});
    Commit c{r.text("scene_id"), std::nullopt};
    if (r.has("tile_count")) c.tile_count = r.integer("tile_count");
    message = std::move(c);
  } else if (type == "ack") {
    r.only({"status", "detail", "ref"});
    message = Ack{r.text("status"), r.text("detail"), r.has("ref") ? r.text("ref") : std::string()};
  } else {
    fail(ErrorCode::unknown_type, "unknown message type '" + type.substr(0, kMaxTextField) + "'");
  }
  validate(message);
  return message;
}

}  // namespace roadscene::protocol
