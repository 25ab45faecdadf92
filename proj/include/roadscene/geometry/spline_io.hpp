#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roadscene/geometry/spline.hpp"
#include "roadscene/io.hpp"

namespace roadscene::geometry {

// { "closed": bool, "control_points": [[x, y], ...] }
inline io::Json to_json(const Spline2D& spline) {
  io::Json pts = io::Json::array();
  for (const auto& p : spline.control_points()) pts.push_back({p.x, p.y});
  return {{"closed", spline.closed()}, {"control_points", std::move(pts)}};
}

inline Spline2D spline_from_json(const io::Json& j) {
  try {
    require(j.is_object(), ErrorCode::invalid_argument, "spline must be a JSON object");
    const auto& pts = j.at("control_points");
    require(pts.is_array(), ErrorCode::invalid_argument, "control_points must be an array");
    require(pts.size() >= kMinControlPoints, ErrorCode::too_few_points,
            "spline file has " + std::to_string(pts.size()) + " control points, need at least 4");
    std::vector<Point2> ctrl;
    ctrl.reserve(pts.size());
    for (const auto& p : pts) {
      require(p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number(), ErrorCode::invalid_argument,
              "control point must be [x, y]");
      ctrl.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    const bool closed = j.contains("closed") ? j.at("closed").get<bool>() : false;
    return Spline2D(std::move(ctrl), closed);
  } catch (const io::Json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("bad spline JSON: ") + e.what());
  }
}

inline Spline2D load_spline(const std::filesystem::path& path) { return spline_from_json(io::read_json(path)); }

inline void save_spline(const std::filesystem::path& path, const Spline2D& spline) {
  io::write_json(path, to_json(spline));
}

}  // namespace roadscene::geometry
