#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoprobe/algorithms.hpp"
#include "geoprobe/errors.hpp"
#include "geoprobe/geometry.hpp"

namespace geoprobe {

/// Dimensionally extended 9-intersection matrix. Rows are the subject's
/// interior/boundary/exterior, columns the object's; -1 encodes F.
class DE9IMMatrix {
public:
  static constexpr int kEmpty = -1;

  DE9IMMatrix() { cells_.fill(kEmpty); }

  static DE9IMMatrix from_string(std::string_view s) {
    if (s.size() != 9) throw DataError("DE-9IM string must have 9 cells: " + std::string(s));
    DE9IMMatrix m;
    for (std::size_t i = 0; i < 9; ++i) {
      const char ch = s[i];
      if (ch == 'F') m.cells_[i] = kEmpty;
      else if (ch >= '0' && ch <= '2') m.cells_[i] = ch - '0';
      else throw DataError("invalid DE-9IM cell '" + std::string(1, ch) + "'");
    }
    return m;
  }

  int at(Location row, Location col) const noexcept {
    return cells_[static_cast<int>(row) * 3 + static_cast<int>(col)];
  }

  /// Raises a cell to at least dim.
  void raise(Location row, Location col, int dim) noexcept {
    auto& cell = cells_[static_cast<int>(row) * 3 + static_cast<int>(col)];
    cell = std::max(cell, static_cast<std::int8_t>(dim));
  }

  DE9IMMatrix transposed() const {
    DE9IMMatrix t;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) t.cells_[c * 3 + r] = cells_[r * 3 + c];
    return t;
  }

  /// Matches an OGC mask: 'T' non-empty, 'F' empty, '*' anything, '0'..'2' exact dimension.
  bool matches(std::string_view mask) const noexcept {
    if (mask.size() != 9) return false;
    for (std::size_t i = 0; i < 9; ++i) {
      const int v = cells_[i];
      switch (mask[i]) {
        case '*': break;
        case 'T': if (v == kEmpty) return false; break;
        case 'F': if (v != kEmpty) return false; break;
        default:
          if (v != mask[i] - '0') return false;
      }
    }
    return true;
  }

  std::string to_string() const {
    std::string s(9, 'F');
    for (std::size_t i = 0; i < 9; ++i)
      if (cells_[i] != kEmpty) s[i] = static_cast<char>('0' + cells_[i]);
    return s;
  }

  friend bool operator==(const DE9IMMatrix&, const DE9IMMatrix&) = default;

private:
  std::array<std::int8_t, 9> cells_{};
};

enum class Predicate : std::uint8_t {
  Equals,
  Disjoint,
  Intersects,
  Crosses,
  Touches,
  Contains,
  Within,
  Overlaps,
  DisjointButNear,  // relabeling of disjoint pairs inside the near-buffer
};

inline constexpr std::array<Predicate, 8> kNamedPredicates = {
    Predicate::Equals, Predicate::Disjoint, Predicate::Intersects, Predicate::Crosses,
    Predicate::Touches, Predicate::Contains, Predicate::Within, Predicate::Overlaps};

inline std::string_view to_string(Predicate p) noexcept {
  switch (p) {
    case Predicate::Equals: return "equals";
    case Predicate::Disjoint: return "disjoint";
    case Predicate::Intersects: return "intersects";
    case Predicate::Crosses: return "crosses";
    case Predicate::Touches: return "touches";
    case Predicate::Contains: return "contains";
    case Predicate::Within: return "within";
    case Predicate::Overlaps: return "overlaps";
    case Predicate::DisjointButNear: return "disjoint_but_near";
  }
  return "?";
}

inline Predicate predicate_from_string(std::string_view s) {
  for (Predicate p : kNamedPredicates)
    if (to_string(p) == s) return p;
  if (s == "disjoint_but_near") return Predicate::DisjointButNear;
  throw DataError("unknown predicate: " + std::string(s));
}

/// Small bitset over Predicate values.
class PredicateSet {
public:
  PredicateSet() = default;
  PredicateSet(std::initializer_list<Predicate> ps) {
    for (Predicate p : ps) insert(p);
  }
  void insert(Predicate p) noexcept { bits_ |= bit(p); }
  bool contains(Predicate p) const noexcept { return (bits_ & bit(p)) != 0; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
  friend bool operator==(const PredicateSet&, const PredicateSet&) = default;

private:
  static std::uint16_t bit(Predicate p) noexcept { return static_cast<std::uint16_t>(1u << static_cast<unsigned>(p)); }
  std::uint16_t bits_ = 0;
};

namespace de9im_detail {

struct Segment {
  Coordinate a;
  Coordinate b;
  bool interior_left = false;  // polygon rings only
};

struct OverlapSpan {
  double lo;
  double hi;
  std::size_t other;  // index into the other geometry's segments
};

struct NodedSegment {
  Segment seg;
  std::vector<double> splits;  // parameters along seg in [0, 1]
  std::vector<OverlapSpan> overlaps;
};

inline std::vector<Coordinate> drop_repeats(std::span<const Coordinate> seq) {
  std::vector<Coordinate> out;
  out.reserve(seq.size());
  for (const auto& c : seq)
    if (out.empty() || !(out.back() == c)) out.push_back(c);
  return out;
}

inline void check_simple_ring(const std::vector<Coordinate>& ring) {
  const std::size_t n = ring.size() - 1;  // segment count
  if (n < 3) throw DegenerateGeometry("polygon ring collapses to fewer than 3 distinct vertices");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Coordinate &p1 = ring[i], &p2 = ring[i + 1], &q1 = ring[j], &q2 = ring[j + 1];
      if (adjacent) {
        // Adjacent segments share a vertex; they must not fold back onto each other.
        const Coordinate& shared = (j == i + 1) ? p2 : p1;
        const Coordinate& far_p = (j == i + 1) ? p1 : p2;
        const Coordinate& far_q = (j == i + 1) ? q2 : q1;
        if (orientation(far_p, shared, far_q) == 0 &&
            ((far_q.x - shared.x) * (far_p.x - shared.x) + (far_q.y - shared.y) * (far_p.y - shared.y)) > 0.0)
          throw DegenerateGeometry("polygon ring folds back on itself");
        continue;
      }
      if (segments_intersect(p1, p2, q1, q2)) throw DegenerateGeometry("polygon ring self-intersects");
    }
  }
  if (signed_ring_area(ring) == 0.0) throw DegenerateGeometry("polygon ring has zero area");
}

inline std::vector<NodedSegment> segments_of(const Geometry& g) {
  std::vector<NodedSegment> out;
  auto add = [&out](const std::vector<Coordinate>& seq, std::optional<bool> ring_is_hole) {
    bool interior_left = false;
    if (ring_is_hole) {
      const bool ccw = signed_ring_area(seq) > 0.0;
      interior_left = *ring_is_hole ? !ccw : ccw;
    }
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
      out.push_back({Segment{seq[i], seq[i + 1], interior_left}, {0.0, 1.0}, {}});
  };
  switch (g.kind()) {
    case GeometryKind::Point: break;
    case GeometryKind::LineString: add(drop_repeats(g.as_line_string().path), std::nullopt); break;
    case GeometryKind::Polygon: {
      const auto& poly = g.as_polygon();
      auto ext = drop_repeats(poly.exterior);
      check_simple_ring(ext);
      add(ext, false);
      for (const auto& h : poly.holes) {
        auto hole = drop_repeats(h);
        check_simple_ring(hole);
        add(hole, true);
      }
      break;
    }
  }
  return out;
}

/// Position of p along s, measured on the dominant axis.
inline double param(const Segment& s, const Coordinate& p) noexcept {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double t = std::abs(dx) >= std::abs(dy) ? (p.x - s.a.x) / dx : (p.y - s.a.y) / dy;
  return std::clamp(t, 0.0, 1.0);
}

inline Coordinate at(const Segment& s, double t) noexcept {
  return {s.a.x + t * (s.b.x - s.a.x), s.a.y + t * (s.b.y - s.a.y)};
}

inline Coordinate proper_intersection(const Segment& p, const Segment& q) noexcept {
  const double rx = p.b.x - p.a.x, ry = p.b.y - p.a.y;
  const double sx = q.b.x - q.a.x, sy = q.b.y - q.a.y;
  const double denom = rx * sy - ry * sx;
  const double t = ((q.a.x - p.a.x) * sy - (q.a.y - p.a.y) * sx) / denom;
  return {p.a.x + t * rx, p.a.y + t * ry};
}

/// Location of the relative interior of a line-work element of g.
inline Location linework_location(const Geometry& g) noexcept {
  return g.is_polygon() ? Location::Boundary : Location::Interior;
}

/// Location of a vertex of g relative to g itself.
inline Location self_location(const Geometry& g, const Coordinate& v) noexcept {
  if (g.is_line_string()) return locate(v, g);
  return g.is_polygon() ? Location::Boundary : Location::Interior;
}

/// Location in g of a point known not to lie on g's line work.
inline Location off_linework_location(const Coordinate& p, const Geometry& g) noexcept {
  if (!g.is_polygon()) return Location::Exterior;
  const auto& poly = g.as_polygon();
  if (!inside_ring(p, poly.exterior)) return Location::Exterior;
  for (const auto& h : poly.holes)
    if (inside_ring(p, h)) return Location::Exterior;
  return Location::Interior;
}

/// Writes the contributions of a's line work (edges and adjacent faces)
/// into m, oriented as (a-location, b-location).
inline void add_edge_contributions(DE9IMMatrix& m, const Geometry& a, const std::vector<NodedSegment>& a_segs,
                                   const Geometry& b, const std::vector<NodedSegment>& b_segs, bool transpose) {
  auto put = [&](Location la, Location lb, int dim) {
    if (transpose) m.raise(lb, la, dim);
    else m.raise(la, lb, dim);
  };
  const Location a_line = linework_location(a);
  for (const auto& ns : a_segs) {
    std::vector<double> ts = ns.splits;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const double tm = (ts[k] + ts[k + 1]) / 2.0;
      const OverlapSpan* hit = nullptr;
      for (const auto& ov : ns.overlaps)
        if (tm > ov.lo && tm < ov.hi) hit = &ov;

      Location b_loc;
      if (hit) b_loc = linework_location(b);
      else b_loc = off_linework_location(at(ns.seg, tm), b);
      put(a_line, b_loc, 1);

      if (!a.is_polygon()) continue;
      const Location a_left = ns.seg.interior_left ? Location::Interior : Location::Exterior;
      const Location a_right = ns.seg.interior_left ? Location::Exterior : Location::Interior;
      Location b_left = b_loc, b_right = b_loc;
      if (hit && b.is_polygon()) {
        const Segment& other = b_segs[hit->other].seg;
        const bool same_dir = (ns.seg.b.x - ns.seg.a.x) * (other.b.x - other.a.x) +
                                  (ns.seg.b.y - ns.seg.a.y) * (other.b.y - other.a.y) > 0.0;
        const bool left_inside = same_dir ? other.interior_left : !other.interior_left;
        b_left = left_inside ? Location::Interior : Location::Exterior;
        b_right = left_inside ? Location::Exterior : Location::Interior;
      } else if (hit) {
        b_left = b_right = Location::Exterior;
      }
      put(a_left, b_left, 2);
      put(a_right, b_right, 2);
    }
  }
}

}  // namespace de9im_detail

/// Full DE-9IM matrix of (subject, object). Throws DegenerateGeometry for
/// polygons whose rings self-intersect.
inline DE9IMMatrix de9im(const Geometry& a, const Geometry& b) {
  using namespace de9im_detail;
  DE9IMMatrix m;
  m.raise(Location::Exterior, Location::Exterior, 2);

  auto a_segs = segments_of(a);
  auto b_segs = segments_of(b);

  // Node both line works against each other.
  std::vector<Coordinate> crossings;
  const BBox b_box = bbox(b);
  for (auto& sa : a_segs) {
    BBox sa_box;
    sa_box.expand(sa.seg.a);
    sa_box.expand(sa.seg.b);
    if (!sa_box.intersects(b_box)) continue;
    for (std::size_t j = 0; j < b_segs.size(); ++j) {
      auto& sb = b_segs[j];
      BBox sb_box;
      sb_box.expand(sb.seg.a);
      sb_box.expand(sb.seg.b);
      if (!sa_box.intersects(sb_box)) continue;

      const Segment &p = sa.seg, &q = sb.seg;
      const int o1 = orientation(p.a, p.b, q.a);
      const int o2 = orientation(p.a, p.b, q.b);
      const int o3 = orientation(q.a, q.b, p.a);
      const int o4 = orientation(q.a, q.b, p.b);

      if (o1 == 0 && in_segment_box(q.a, p.a, p.b)) sa.splits.push_back(param(p, q.a));
      if (o2 == 0 && in_segment_box(q.b, p.a, p.b)) sa.splits.push_back(param(p, q.b));
      if (o3 == 0 && in_segment_box(p.a, q.a, q.b)) sb.splits.push_back(param(q, p.a));
      if (o4 == 0 && in_segment_box(p.b, q.a, q.b)) sb.splits.push_back(param(q, p.b));

      if (o1 == 0 && o2 == 0) {
        const double t1 = param(p, q.a), t2 = param(p, q.b);
        const double lo = std::min(t1, t2), hi = std::max(t1, t2);
        if (hi > lo) {
          sa.overlaps.push_back({lo, hi, j});
          const double u1 = param(q, p.a), u2 = param(q, p.b);
          sb.overlaps.push_back({std::min(u1, u2), std::max(u1, u2), static_cast<std::size_t>(&sa - a_segs.data())});
        }
      } else if (o1 * o2 < 0 && o3 * o4 < 0) {
        const Coordinate x = proper_intersection(p, q);
        sa.splits.push_back(param(p, x));
        sb.splits.push_back(param(q, x));
        crossings.push_back(x);
      }
    }
  }

  // Zero-dimensional contributions: every vertex and every proper crossing.
  detail::for_each_vertex(a, [&](const Coordinate& v) {
    m.raise(self_location(a, v), locate(v, b), 0);
  });
  detail::for_each_vertex(b, [&](const Coordinate& v) {
    m.raise(locate(v, a), self_location(b, v), 0);
  });
  if (!crossings.empty()) m.raise(linework_location(a), linework_location(b), 0);

  // One- and two-dimensional contributions from the noded edges.
  add_edge_contributions(m, a, a_segs, b, b_segs, false);
  add_edge_contributions(m, b, b_segs, a, a_segs, true);
  return m;
}

/// The OGC named predicates that hold for matrix m of a (type_a, type_b) pair.
inline PredicateSet named_predicates(const DE9IMMatrix& m, GeometryKind type_a, GeometryKind type_b) {
  const int da = dimension(type_a);
  const int db = dimension(type_b);
  PredicateSet out;

  const bool disjoint = m.matches("FF*FF****");
  if (disjoint) out.insert(Predicate::Disjoint);
  else out.insert(Predicate::Intersects);

  if (da == db && m.matches("T*F**FFF*")) out.insert(Predicate::Equals);
  if (m.matches("T*F**F***")) out.insert(Predicate::Within);
  if (m.matches("T*****FF*")) out.insert(Predicate::Contains);
  if (!(da == 0 && db == 0) &&
      (m.matches("FT*******") || m.matches("F**T*****") || m.matches("F***T****")))
    out.insert(Predicate::Touches);

  bool crosses = false;
  if (da < db) crosses = m.matches("T*T******");
  else if (da > db) crosses = m.matches("T*****T**");
  else if (da == 1) crosses = m.matches("0********");
  if (crosses) out.insert(Predicate::Crosses);

  bool overlaps = false;
  if (da == db) overlaps = (da == 1) ? m.matches("1*T***T**") : m.matches("T*T***T**");
  if (overlaps) out.insert(Predicate::Overlaps);
  return out;
}

/// Single-label collapse, most specific first:
/// equals > within > contains > crosses > overlaps > touches > disjoint,
/// falling back to intersects.
inline Predicate classify(const PredicateSet& preds) noexcept {
  for (Predicate p : {Predicate::Equals, Predicate::Within, Predicate::Contains, Predicate::Crosses,
                      Predicate::Overlaps, Predicate::Touches, Predicate::Disjoint})
    if (preds.contains(p)) return p;
  return Predicate::Intersects;
}

inline Predicate classify_relation(const Geometry& a, const Geometry& b) {
  return classify(named_predicates(de9im(a, b), a.kind(), b.kind()));
}

inline constexpr double kDefaultNearRadius = 0.003;

inline bool is_disjoint_but_near(const Geometry& a, const Geometry& b, double radius = kDefaultNearRadius) {
  if (!(radius > 0.0)) throw ConfigError("near radius must be positive");
  if (classify_relation(a, b) != Predicate::Disjoint) return false;
  return min_distance(a, b) <= radius;
}

}  // namespace geoprobe
