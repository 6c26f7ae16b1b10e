#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geoprobe/errors.hpp"

namespace geoprobe {

/// Planar coordinate in degrees, WKT axis order (x = longitude, y = latitude).
struct Coordinate {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

inline bool bitwise_equal(const Coordinate& a, const Coordinate& b) noexcept {
  return std::bit_cast<std::uint64_t>(a.x) == std::bit_cast<std::uint64_t>(b.x) &&
         std::bit_cast<std::uint64_t>(a.y) == std::bit_cast<std::uint64_t>(b.y);
}

enum class GeometryKind : std::uint8_t { Point = 0, LineString = 1, Polygon = 2 };

inline constexpr int kGeometryKindCount = 3;

inline std::string_view to_string(GeometryKind kind) noexcept {
  switch (kind) {
    case GeometryKind::Point: return "Point";
    case GeometryKind::LineString: return "LineString";
    case GeometryKind::Polygon: return "Polygon";
  }
  return "?";
}

inline GeometryKind geometry_kind_from_string(std::string_view s) {
  if (s == "Point") return GeometryKind::Point;
  if (s == "LineString") return GeometryKind::LineString;
  if (s == "Polygon") return GeometryKind::Polygon;
  throw DataError("unknown geometry type name: " + std::string(s));
}

/// Topological dimension of the geometry kind (0, 1 or 2).
inline int dimension(GeometryKind kind) noexcept { return static_cast<int>(kind); }

using Ring = std::vector<Coordinate>;

struct PointData {
  Coordinate coord;
  friend bool operator==(const PointData&, const PointData&) = default;
};

struct LineStringData {
  std::vector<Coordinate> path;
  friend bool operator==(const LineStringData&, const LineStringData&) = default;
};

struct PolygonData {
  Ring exterior;
  std::vector<Ring> holes;
  friend bool operator==(const PolygonData&, const PolygonData&) = default;
};

/// A Point, LineString or Polygon. Instances can only be created through the
/// validating factories, so every Geometry satisfies:
///  - all coordinates finite
///  - LineString has at least 2 coordinates
///  - every polygon ring is closed (bitwise) and has at least 4 coordinates
class Geometry {
public:
  static Geometry point(Coordinate c) {
    check_finite(c);
    return Geometry(PointData{c});
  }
  static Geometry point(double x, double y) { return point(Coordinate{x, y}); }

  static Geometry line_string(std::vector<Coordinate> path) {
    if (path.size() < 2) throw InvalidGeometry("LineString needs at least 2 coordinates");
    for (const auto& c : path) check_finite(c);
    return Geometry(LineStringData{std::move(path)});
  }

  static Geometry polygon(Ring exterior, std::vector<Ring> holes = {}) {
    check_ring(exterior);
    for (const auto& h : holes) check_ring(h);
    return Geometry(PolygonData{std::move(exterior), std::move(holes)});
  }

  /// Axis-aligned rectangle as a closed counter-clockwise ring.
  static Geometry rectangle(double min_x, double min_y, double max_x, double max_y) {
    return polygon({{min_x, min_y}, {max_x, min_y}, {max_x, max_y}, {min_x, max_y}, {min_x, min_y}});
  }

  GeometryKind kind() const noexcept { return static_cast<GeometryKind>(data_.index()); }
  int dimension() const noexcept { return geoprobe::dimension(kind()); }

  bool is_point() const noexcept { return kind() == GeometryKind::Point; }
  bool is_line_string() const noexcept { return kind() == GeometryKind::LineString; }
  bool is_polygon() const noexcept { return kind() == GeometryKind::Polygon; }

  const PointData& as_point() const { return std::get<PointData>(data_); }
  const LineStringData& as_line_string() const { return std::get<LineStringData>(data_); }
  const PolygonData& as_polygon() const { return std::get<PolygonData>(data_); }

  /// Calls f with a span over each coordinate sequence (point, path, or each ring).
  template <typename F>
  void for_each_sequence(F&& f) const {
    switch (kind()) {
      case GeometryKind::Point: f(std::span<const Coordinate>(&as_point().coord, 1)); break;
      case GeometryKind::LineString: f(std::span<const Coordinate>(as_line_string().path)); break;
      case GeometryKind::Polygon:
        f(std::span<const Coordinate>(as_polygon().exterior));
        for (const auto& h : as_polygon().holes) f(std::span<const Coordinate>(h));
        break;
    }
  }

  friend bool operator==(const Geometry&, const Geometry&) = default;

private:
  using Data = std::variant<PointData, LineStringData, PolygonData>;
  explicit Geometry(Data d) : data_(std::move(d)) {}

  static void check_finite(const Coordinate& c) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y))
      throw InvalidGeometry("non-finite coordinate");
  }
  static void check_ring(const Ring& ring) {
    if (ring.size() < 4) throw InvalidGeometry("polygon ring needs at least 4 coordinates");
    for (const auto& c : ring) check_finite(c);
    if (!bitwise_equal(ring.front(), ring.back())) throw InvalidGeometry("polygon ring is not closed");
  }

  Data data_;
};

struct GeometryRecord {
  std::string id;
  Geometry geometry;
  std::string source;

  friend bool operator==(const GeometryRecord&, const GeometryRecord&) = default;
};

}  // namespace geoprobe
