#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>

#include "geoprobe/errors.hpp"
#include "geoprobe/geometry.hpp"

namespace geoprobe {

namespace robust_detail {

struct TwoTerm {
  double hi;
  double lo;
};

inline TwoTerm two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  return {s, (a - av) + (b - bv)};
}

inline TwoTerm two_product(double a, double b) noexcept {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

/// Nonoverlapping expansion in increasing magnitude order (fixed capacity is
/// enough for the 16 exact partial products of an orientation determinant).
struct Expansion {
  std::array<double, 32> terms{};
  std::size_t size = 0;

  /// Adds b exactly (Grow-Expansion with zero elimination).
  void grow(double b) noexcept {
    double q = b;
    std::size_t out = 0;
    for (std::size_t i = 0; i < size; ++i) {
      const auto [sum, err] = two_sum(q, terms[i]);
      q = sum;
      if (err != 0.0) terms[out++] = err;
    }
    size = out;
    if (q != 0.0) terms[size++] = q;
  }

  int sign() const noexcept { return size == 0 ? 0 : (terms[size - 1] > 0.0 ? 1 : -1); }
};

/// Exact sign of (b - a).x * (c - a).y - (b - a).y * (c - a).x.
inline int exact_orientation(const Coordinate& a, const Coordinate& b, const Coordinate& c) noexcept {
  const TwoTerm d[4] = {two_sum(b.x, -a.x), two_sum(c.y, -a.y), two_sum(b.y, -a.y), two_sum(c.x, -a.x)};
  Expansion e;
  auto add_product = [&e](const TwoTerm& u, const TwoTerm& v, double sign) {
    for (double x : {u.hi, u.lo})
      for (double y : {v.hi, v.lo}) {
        const auto [p, err] = two_product(sign * x, y);
        e.grow(err);
        e.grow(p);
      }
  };
  add_product(d[0], d[1], 1.0);
  add_product(d[2], d[3], -1.0);
  return e.sign();
}

}  // namespace robust_detail

/// Exact sign of the turn a -> b -> c: +1 left (counter-clockwise), -1 right,
/// 0 collinear. A floating-point filter decides most cases; the remainder
/// fall back to expansion arithmetic.
inline int orientation(const Coordinate& a, const Coordinate& b, const Coordinate& c) noexcept {
  const double left = (b.x - a.x) * (c.y - a.y);
  const double right = (b.y - a.y) * (c.x - a.x);
  const double det = left - right;
  const double bound = 3.3306690738754716e-16 * (std::abs(left) + std::abs(right));
  if (det > bound) return 1;
  if (det < -bound) return -1;
  return robust_detail::exact_orientation(a, b, c);
}

inline bool in_segment_box(const Coordinate& p, const Coordinate& a, const Coordinate& b) noexcept {
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

/// True when p lies on the closed segment [a, b].
inline bool on_segment(const Coordinate& p, const Coordinate& a, const Coordinate& b) noexcept {
  return in_segment_box(p, a, b) && orientation(a, b, p) == 0;
}

/// True when the closed segments [p1,p2] and [q1,q2] share at least one point.
inline bool segments_intersect(const Coordinate& p1, const Coordinate& p2, const Coordinate& q1,
                               const Coordinate& q2) noexcept {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  return (o1 == 0 && in_segment_box(q1, p1, p2)) || (o2 == 0 && in_segment_box(q2, p1, p2)) ||
         (o3 == 0 && in_segment_box(p1, q1, q2)) || (o4 == 0 && in_segment_box(p2, q1, q2));
}

inline double distance(const Coordinate& a, const Coordinate& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double point_segment_distance(const Coordinate& p, const Coordinate& a, const Coordinate& b) noexcept {
  if (a == b) return distance(p, a);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  const double r = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  if (r <= 0.0) return distance(p, a);
  if (r >= 1.0) return distance(p, b);
  const double s = ((a.y - p.y) * dx - (a.x - p.x) * dy) / len2;
  return std::abs(s) * std::sqrt(len2);
}

enum class Location : std::uint8_t { Interior = 0, Boundary = 1, Exterior = 2 };

/// Crossing-number parity test; callers handle points on the ring first.
inline bool inside_ring(const Coordinate& p, std::span<const Coordinate> ring) noexcept {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Coordinate& a = ring[i];
    const Coordinate& b = ring[i + 1];
    if ((a.y > p.y) == (b.y > p.y)) continue;
    const int o = orientation(a, b, p);
    if ((b.y > a.y) ? o > 0 : o < 0) inside = !inside;
  }
  return inside;
}

inline bool on_ring(const Coordinate& p, std::span<const Coordinate> ring) noexcept {
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    if (on_segment(p, ring[i], ring[i + 1])) return true;
  return false;
}

inline bool is_closed(std::span<const Coordinate> path) noexcept {
  return path.size() > 1 && path.front() == path.back();
}

/// Location of a point relative to g under OGC rules (mod-2 line boundary,
/// closed lines have no boundary, polygon boundary = all rings).
inline Location locate(const Coordinate& p, const Geometry& g) noexcept {
  switch (g.kind()) {
    case GeometryKind::Point:
      return p == g.as_point().coord ? Location::Interior : Location::Exterior;
    case GeometryKind::LineString: {
      const auto& path = g.as_line_string().path;
      if (!is_closed(path) && (p == path.front() || p == path.back())) return Location::Boundary;
      for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (on_segment(p, path[i], path[i + 1])) return Location::Interior;
      return Location::Exterior;
    }
    case GeometryKind::Polygon: {
      const auto& poly = g.as_polygon();
      if (on_ring(p, poly.exterior)) return Location::Boundary;
      for (const auto& h : poly.holes)
        if (on_ring(p, h)) return Location::Boundary;
      if (!inside_ring(p, poly.exterior)) return Location::Exterior;
      for (const auto& h : poly.holes)
        if (inside_ring(p, h)) return Location::Exterior;
      return Location::Interior;
    }
  }
  return Location::Exterior;
}

/// Signed shoelace area of a closed ring; positive for counter-clockwise.
/// Coordinates are shifted by the first x to limit cancellation.
inline double signed_ring_area(std::span<const Coordinate> ring) noexcept {
  if (ring.size() < 3) return 0.0;
  const double x0 = ring[0].x;
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
    const double x = ring[i].x - x0;
    sum += x * (ring[i + 1].y - ring[i - 1].y);
  }
  return sum / 2.0;
}

/// Area in square degrees: 0 for points and lines; exterior minus holes for polygons.
inline double area(const Geometry& g) {
  if (!g.is_polygon()) return 0.0;
  const auto& poly = g.as_polygon();
  double a = std::abs(signed_ring_area(poly.exterior));
  for (const auto& h : poly.holes) a -= std::abs(signed_ring_area(h));
  if (a < 0.0) throw DegenerateGeometry("polygon holes exceed exterior area");
  return a;
}

inline Coordinate centroid(const Geometry& g) {
  switch (g.kind()) {
    case GeometryKind::Point: return g.as_point().coord;
    case GeometryKind::LineString: {
      const auto& path = g.as_line_string().path;
      double sx = 0.0, sy = 0.0, total = 0.0;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const double len = distance(path[i], path[i + 1]);
        sx += len * (path[i].x + path[i + 1].x) / 2.0;
        sy += len * (path[i].y + path[i + 1].y) / 2.0;
        total += len;
      }
      if (total == 0.0) throw DegenerateGeometry("zero-length LineString has no centroid");
      return {sx / total, sy / total};
    }
    case GeometryKind::Polygon: {
      // Fan of triangles from the first exterior vertex; holes are
      // subtracted by flipping their orientation against the shell's.
      const auto& poly = g.as_polygon();
      const Coordinate base = poly.exterior.front();
      double cx = 0.0, cy = 0.0, area2 = 0.0;
      auto add_ring = [&](std::span<const Coordinate> ring, bool hole) {
        const double orient = signed_ring_area(ring) >= 0.0 ? 1.0 : -1.0;
        const double sign = hole ? -orient : orient;
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
          const Coordinate& p1 = ring[i];
          const Coordinate& p2 = ring[i + 1];
          const double a2 = (p1.x - base.x) * (p2.y - base.y) - (p2.x - base.x) * (p1.y - base.y);
          cx += sign * a2 * (base.x + p1.x + p2.x);
          cy += sign * a2 * (base.y + p1.y + p2.y);
          area2 += sign * a2;
        }
      };
      add_ring(poly.exterior, false);
      for (const auto& h : poly.holes) add_ring(h, true);
      if (area2 == 0.0) throw DegenerateGeometry("zero-area Polygon has no centroid");
      return {cx / (3.0 * area2), cy / (3.0 * area2)};
    }
  }
  return {};
}

struct BBox {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  bool empty() const noexcept { return min_x > max_x || min_y > max_y; }
  void expand(const Coordinate& c) noexcept {
    min_x = std::min(min_x, c.x);
    min_y = std::min(min_y, c.y);
    max_x = std::max(max_x, c.x);
    max_y = std::max(max_y, c.y);
  }
  BBox expanded(double r) const noexcept { return {min_x - r, min_y - r, max_x + r, max_y + r}; }
  bool intersects(const BBox& o) const noexcept {
    return !(o.min_x > max_x || o.max_x < min_x || o.min_y > max_y || o.max_y < min_y);
  }
  double width() const noexcept { return max_x - min_x; }
  double height() const noexcept { return max_y - min_y; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

inline BBox bbox(const Geometry& g) noexcept {
  BBox box;
  g.for_each_sequence([&](std::span<const Coordinate> seq) {
    for (const auto& c : seq) box.expand(c);
  });
  return box;
}

namespace detail {

template <typename F>
void for_each_segment(const Geometry& g, F&& f) {
  g.for_each_sequence([&](std::span<const Coordinate> seq) {
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) f(seq[i], seq[i + 1]);
  });
}

template <typename F>
void for_each_vertex(const Geometry& g, F&& f) {
  g.for_each_sequence([&](std::span<const Coordinate> seq) {
    for (const auto& c : seq) f(c);
  });
}

}  // namespace detail

/// True when the closed point sets of a and b share any point.
inline bool intersects(const Geometry& a, const Geometry& b) noexcept {
  if (!bbox(a).intersects(bbox(b))) return false;
  bool hit = false;
  detail::for_each_vertex(a, [&](const Coordinate& c) {
    if (!hit && locate(c, b) != Location::Exterior) hit = true;
  });
  if (hit) return true;
  detail::for_each_vertex(b, [&](const Coordinate& c) {
    if (!hit && locate(c, a) != Location::Exterior) hit = true;
  });
  if (hit) return true;
  detail::for_each_segment(a, [&](const Coordinate& p1, const Coordinate& p2) {
    if (hit) return;
    detail::for_each_segment(b, [&](const Coordinate& q1, const Coordinate& q2) {
      if (!hit && segments_intersect(p1, p2, q1, q2)) hit = true;
    });
  });
  return hit;
}

/// Minimum Euclidean distance in degrees; 0 exactly when the geometries intersect.
inline double min_distance(const Geometry& a, const Geometry& b) noexcept {
  if (intersects(a, b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto vertex_to_segments = [&best](const Geometry& from, const Geometry& to) {
    detail::for_each_vertex(from, [&](const Coordinate& p) {
      if (to.is_point()) {
        best = std::min(best, distance(p, to.as_point().coord));
        return;
      }
      detail::for_each_segment(to, [&](const Coordinate& q1, const Coordinate& q2) {
        best = std::min(best, point_segment_distance(p, q1, q2));
      });
    });
  };
  vertex_to_segments(a, b);
  vertex_to_segments(b, a);
  return best;
}

}  // namespace geoprobe
