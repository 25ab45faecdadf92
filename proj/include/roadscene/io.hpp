#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "roadscene/error.hpp"

namespace roadscene::io {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never observes a partially written file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  static std::atomic<unsigned> counter{0};
  const auto parent = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  const auto tmp = parent / ("." + path.filename().string() + ".tmp" + std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) fail(ErrorCode::io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::io, "cannot rename into " + path.string());
  }
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::invalid_argument, what + ": " + e.what());
  }
}

inline Json read_json(const std::filesystem::path& path) { return parse_json(read_file(path), path.string()); }

inline void write_json(const std::filesystem::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

}  // namespace roadscene::io
