#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geoprobe/algorithms.hpp"
#include "geoprobe/errors.hpp"
#include "geoprobe/geometry.hpp"

namespace geoprobe {

inline constexpr double kDefaultGridCell = 0.005;

/// Uniform grid over record bounding boxes. Immutable after construction.
/// Queries return candidates (every record whose bbox meets the query box)
/// that callers filter exactly.
class GridIndex {
public:
  GridIndex(const std::vector<GeometryRecord>& records, double cell) : cell_(cell) {
    if (!(cell > 0.0)) throw ConfigError("grid cell size must be positive");
    ids_.reserve(records.size());
    boxes_.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      ids_.push_back(records[i].id);
      boxes_.push_back(bbox(records[i].geometry));
      const auto [x0, y0, x1, y1] = cell_range(boxes_.back());
      for (std::int64_t cx = x0; cx <= x1; ++cx)
        for (std::int64_t cy = y0; cy <= y1; ++cy) cells_[key(cx, cy)].push_back(i);
    }
  }

  std::size_t size() const noexcept { return ids_.size(); }
  double cell_size() const noexcept { return cell_; }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const BBox& box(std::size_t i) const { return boxes_.at(i); }

  /// Positions of all records whose bbox intersects `query`, ascending.
  std::vector<std::size_t> query(const BBox& query) const {
    std::vector<std::size_t> out;
    if (query.empty() || ids_.empty()) return out;
    const auto [x0, y0, x1, y1] = cell_range(query);
    const double span = (static_cast<double>(x1 - x0) + 1.0) * (static_cast<double>(y1 - y0) + 1.0);
    auto consider = [&](const std::vector<std::size_t>& bucket) {
      for (std::size_t i : bucket)
        if (boxes_[i].intersects(query)) out.push_back(i);
    };
    if (span > static_cast<double>(cells_.size())) {
      for (const auto& [k, bucket] : cells_) consider(bucket);
    } else {
      for (std::int64_t cx = x0; cx <= x1; ++cx)
        for (std::int64_t cy = y0; cy <= y1; ++cy) {
          auto it = cells_.find(key(cx, cy));
          if (it != cells_.end()) consider(it->second);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

private:
  struct CellRange {
    std::int64_t x0, y0, x1, y1;
  };

  CellRange cell_range(const BBox& b) const noexcept {
    return {coord(b.min_x), coord(b.min_y), coord(b.max_x), coord(b.max_y)};
  }
  std::int64_t coord(double v) const noexcept {
    return static_cast<std::int64_t>(std::floor(v / cell_));
  }
  static std::uint64_t key(std::int64_t cx, std::int64_t cy) noexcept {
    return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  }

  double cell_;
  std::vector<std::string> ids_;
  std::vector<BBox> boxes_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

inline GridIndex build_index(const std::vector<GeometryRecord>& records, double cell = kDefaultGridCell) {
  return GridIndex(records, cell);
}

inline std::set<std::string> query_bbox(const GridIndex& idx, const BBox& box) {
  std::set<std::string> out;
  for (std::size_t i : idx.query(box)) out.insert(idx.id(i));
  return out;
}

/// Index-accelerated distance join, by position: every (subject, object)
/// with min_distance <= radius. Sorted by (subject, object).
inline std::vector<std::pair<std::size_t, std::size_t>> join_positions(const std::vector<GeometryRecord>& subjects,
                                                                      const std::vector<GeometryRecord>& objects,
                                                                      const GridIndex& object_index, double radius) {
  if (radius < 0.0) throw ConfigError("join radius must be non-negative");
  // Slack so floating-point error in the box expansion never drops a pair
  // whose exact distance is within the radius.
  const double pad = radius * (1.0 + 1e-9) + 1e-12;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    const Geometry& g = subjects[s].geometry;
    for (std::size_t o : object_index.query(bbox(g).expanded(pad))) {
      const Geometry& h = objects[o].geometry;
      const bool hit = radius == 0.0 ? intersects(g, h) : min_distance(g, h) <= radius;
      if (hit) out.emplace_back(s, o);
    }
  }
  return out;
}

/// Pairs of ids whose geometries lie within `radius` degrees (0 = intersect).
inline std::vector<std::pair<std::string, std::string>> join_pairs(const std::vector<GeometryRecord>& subjects,
                                                                   const std::vector<GeometryRecord>& objects,
                                                                   double radius, double cell = kDefaultGridCell) {
  const GridIndex idx = build_index(objects, cell);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [s, o] : join_positions(subjects, objects, idx, radius))
    out.emplace_back(subjects[s].id, objects[o].id);
  return out;
}

}  // namespace geoprobe
