#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geoprobe/algorithms.hpp"
#include "geoprobe/de9im.hpp"
#include "geoprobe/errors.hpp"
#include "geoprobe/geometry.hpp"
#include "geoprobe/spatial_index.hpp"

namespace geoprobe {

struct BuilderConfig {
  BBox study_bbox{-89.50, 43.03, -89.30, 43.13};
  std::size_t samples_per_type = 4000;
  std::size_t triplet_quota = 400;      // per (subject type, predicate, object type)
  std::size_t location_objects = 200;   // per (predicate, object type)
  std::size_t min_subjects = 5;         // answer sets must be strictly larger
  double near_radius = kDefaultNearRadius;
  std::array<double, 3> split_ratios{0.80, 0.05, 0.15};
  std::uint64_t seed = 20230912;
  double grid_cell = kDefaultGridCell;

  void validate() const {
    const double sum = split_ratios[0] + split_ratios[1] + split_ratios[2];
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
    for (double r : split_ratios)
      if (!(r > 0.0)) throw ConfigError("split ratios must be positive");
    if (triplet_quota == 0 || location_objects == 0 || min_subjects == 0)
      throw ConfigError("quotas must be positive");
    if (!(near_radius > 0.0)) throw ConfigError("near radius must be positive");
    if (!(grid_cell > 0.0)) throw ConfigError("grid cell must be positive");
    if (study_bbox.empty()) throw ConfigError("study bbox is empty");
  }
};

/// Independent RNG stream per build stage, derived from the master seed.
inline std::mt19937_64 stage_rng(std::uint64_t seed, std::uint64_t stage) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage)};
  return std::mt19937_64(seq);
}

/// Seeded subset of size min(k, n), returned in the input's order.
template <typename T>
std::vector<T> seeded_sample(const std::vector<T>& items, std::size_t k, std::mt19937_64& rng) {
  if (items.size() <= k) return items;
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(k);
  std::sort(order.begin(), order.end());
  std::vector<T> out;
  out.reserve(k);
  for (std::size_t i : order) out.push_back(items[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic geometry generator

namespace synth_detail {

inline std::vector<Coordinate> convex_hull(std::vector<Coordinate> pts) {
  std::sort(pts.begin(), pts.end(), [](const Coordinate& a, const Coordinate& b) {
    return std::tie(a.x, a.y) < std::tie(b.x, b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return {};
  std::vector<Coordinate> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && orientation(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && orientation(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k);  // closed: last == first
  return hull.size() >= 4 ? hull : std::vector<Coordinate>{};
}

class Generator {
public:
  explicit Generator(const BuilderConfig& cfg) : cfg_(cfg), rng_(stage_rng(cfg.seed, 1)) {}

  std::vector<GeometryRecord> run() {
    const std::size_t n = cfg_.samples_per_type;
    make_polygons(n);
    make_lines(n);
    make_points(n);
    std::vector<GeometryRecord> out;
    out.reserve(3 * n);
    for (auto* group : {&points_, &lines_, &polygons_})
      for (auto& r : *group) out.push_back(std::move(r));
    return out;
  }

private:
  struct Rect {
    double x0, y0, x1, y1;
  };

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  Coordinate uniform_point(double margin = 0.0) {
    const auto& b = cfg_.study_bbox;
    return {uniform(b.min_x + margin, b.max_x - margin), uniform(b.min_y + margin, b.max_y - margin)};
  }

  Coordinate clamp_to_study(Coordinate c) const {
    const auto& b = cfg_.study_bbox;
    return {std::clamp(c.x, b.min_x, b.max_x), std::clamp(c.y, b.min_y, b.max_y)};
  }

  static std::string make_id(const char* prefix, std::size_t i) {
    std::string digits = std::to_string(i);
    return prefix + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
  }

  void add_polygon(Geometry g, std::optional<Rect> rect = std::nullopt) {
    if (rect) rects_.push_back(*rect);
    polygons_.push_back({make_id("pg", polygons_.size()), std::move(g), "footprint"});
  }

  void add_rect(const Rect& r) {
    const auto& b = cfg_.study_bbox;
    if (r.x0 < b.min_x || r.y0 < b.min_y || r.x1 > b.max_x || r.y1 > b.max_y) return;
    add_polygon(Geometry::rectangle(r.x0, r.y0, r.x1, r.y1), r);
  }

  Rect random_rect(double lo, double hi) {
    const double w = uniform(lo, hi), h = uniform(lo, hi);
    const Coordinate c = uniform_point(0.006);
    return {c.x, c.y, c.x + w, c.y + h};
  }

  void make_polygons(std::size_t n) {
    const std::size_t n_blocks = n / 10;
    for (std::size_t i = 0; i < n_blocks; ++i) {
      blocks_.push_back(random_rect(0.003, 0.005));
      add_rect(blocks_.back());  // always inside: random_rect keeps a 0.006 margin
    }
    while (polygons_.size() < n) {
      const double r = uniform(0.0, 1.0);
      if (r < 0.12 && !blocks_.empty()) {
        // Footprint nested in a block.
        const Rect& b = blocks_[pick(blocks_.size())];
        const double w = uniform(0.0005, 0.0012), h = uniform(0.0005, 0.0012);
        const double x0 = uniform(b.x0 + 0.0002, b.x1 - w - 0.0002);
        const double y0 = uniform(b.y0 + 0.0002, b.y1 - h - 0.0002);
        add_rect({x0, y0, x0 + w, y0 + h});
      } else if (r < 0.32 && !rects_.empty()) {
        // Shares part of the right edge of an existing rectangle.
        const Rect b = rects_[pick(rects_.size())];
        const double w = uniform(0.0005, 0.0015);
        const double h = b.y1 - b.y0;
        const double y0 = b.y0 + uniform(-0.4, 0.4) * h;
        add_rect({b.x1, y0, b.x1 + w, y0 + h});
      } else if (r < 0.44 && !rects_.empty()) {
        // Partially overlaps an existing rectangle.
        const Rect b = rects_[pick(rects_.size())];
        const double w = b.x1 - b.x0, h = b.y1 - b.y0;
        const double x0 = b.x0 + uniform(0.3, 0.7) * w, y0 = b.y0 + uniform(0.3, 0.7) * h;
        add_rect({x0, y0, x0 + uniform(0.6, 1.2) * w, y0 + uniform(0.6, 1.2) * h});
      } else if (r < 0.62) {
        const Coordinate c = uniform_point(0.006);
        const double ext = uniform(0.00025, 0.0025);
        std::vector<Coordinate> pts;
        const std::size_t k = 5 + pick(4);
        for (std::size_t i = 0; i < k; ++i) pts.push_back({c.x + uniform(-ext, ext), c.y + uniform(-ext, ext)});
        auto hull = convex_hull(std::move(pts));
        if (!hull.empty() && std::abs(signed_ring_area(hull)) > 1e-9) add_polygon(Geometry::polygon(std::move(hull)));
      } else {
        add_rect(random_rect(0.0005, 0.0015));
      }
    }
  }

  Coordinate step_from(const Coordinate& p, double& heading) {
    heading += uniform(-0.8, 0.8);
    const double len = 0.0005 * uniform(0.5, 1.5);
    return clamp_to_study({p.x + len * std::cos(heading), p.y + len * std::sin(heading)});
  }

  std::vector<Coordinate> walk(Coordinate start, std::size_t vertices) {
    std::vector<Coordinate> path{start};
    double heading = uniform(0.0, 2.0 * std::numbers::pi);
    while (path.size() < vertices) {
      const Coordinate next = step_from(path.back(), heading);
      if (!(next == path.back())) path.push_back(next);
      else heading += std::numbers::pi / 2;
    }
    return path;
  }

  void add_line(std::vector<Coordinate> path) {
    lines_.push_back({make_id("ln", lines_.size()), Geometry::line_string(std::move(path)), "link"});
  }

  const std::vector<Coordinate>& line_path(std::size_t i) const { return lines_[i].geometry.as_line_string().path; }

  void make_lines(std::size_t n) {
    while (lines_.size() < n) {
      const double r = uniform(0.0, 1.0);
      const std::size_t len = 2 + pick(19);
      if (r < 0.12 && !blocks_.empty()) {
        // Wanders inside a block.
        const Rect& b = blocks_[pick(blocks_.size())];
        std::vector<Coordinate> path;
        for (std::size_t i = 0; i < std::min<std::size_t>(len, 6); ++i)
          path.push_back({uniform(b.x0 + 1e-5, b.x1 - 1e-5), uniform(b.y0 + 1e-5, b.y1 - 1e-5)});
        if (path.size() < 2) path.push_back({uniform(b.x0 + 1e-5, b.x1 - 1e-5), b.y0 + (b.y1 - b.y0) / 2});
        add_line(std::move(path));
      } else if (r < 0.24 && !polygons_.empty()) {
        // Starts inside a polygon and leaves it.
        const auto& poly = polygons_[pick(polygons_.size())].geometry;
        const Coordinate start = centroid(poly);
        const BBox box = bbox(poly);
        const double heading = uniform(0.0, 2.0 * std::numbers::pi);
        const double reach = std::max(box.width(), box.height()) * 1.5 + 0.0005;
        const std::size_t k = 2 + pick(4);
        std::vector<Coordinate> path{start};
        for (std::size_t i = 1; i <= k; ++i) {
          const double t = reach * static_cast<double>(i) / static_cast<double>(k);
          path.push_back(clamp_to_study({start.x + t * std::cos(heading) + uniform(-1e-4, 1e-4),
                                         start.y + t * std::sin(heading) + uniform(-1e-4, 1e-4)}));
        }
        add_line(std::move(path));
      } else if (r < 0.34 && !rects_.empty()) {
        // Starts on the left edge of a rectangle and heads west.
        const Rect& b = rects_[pick(rects_.size())];
        std::vector<Coordinate> path{{b.x0, uniform(b.y0, b.y1)}};
        for (std::size_t i = 1; i < std::max<std::size_t>(len / 2, 2); ++i)
          path.push_back(clamp_to_study(
              {path.back().x - uniform(0.0002, 0.0005), path.back().y + uniform(-0.0004, 0.0004)}));
        add_line(std::move(path));
      } else if (r < 0.44 && !lines_.empty()) {
        // Continues from the endpoint of another line.
        const auto& other = line_path(pick(lines_.size()));
        add_line(walk(chance(0.5) ? other.front() : other.back(), len));
      } else if (r < 0.52 && !lines_.empty()) {
        // Exact sub-path of another line.
        const auto& other = line_path(pick(lines_.size()));
        if (other.size() < 3) continue;
        const std::size_t i = pick(other.size() - 2);
        const std::size_t j = i + 1 + pick(other.size() - 2 - i);
        add_line(std::vector<Coordinate>(other.begin() + static_cast<std::ptrdiff_t>(i),
                                         other.begin() + static_cast<std::ptrdiff_t>(j) + 1));
      } else if (r < 0.62 && !lines_.empty()) {
        // Shares one segment with another line, then diverges.
        const auto& other = line_path(pick(lines_.size()));
        const std::size_t i = pick(other.size() - 1);
        std::vector<Coordinate> path{
            clamp_to_study({other[i].x + uniform(-4e-4, 4e-4), other[i].y + uniform(-4e-4, 4e-4)}), other[i],
            other[i + 1]};
        auto tail = walk(other[i + 1], 2 + pick(4));
        path.insert(path.end(), tail.begin() + 1, tail.end());
        add_line(std::move(path));
      } else {
        add_line(walk(uniform_point(), len));
      }
    }
  }

  void add_point(Coordinate c, const char* source) {
    points_.push_back({make_id("pt", points_.size()), Geometry::point(c), source});
  }

  void make_points(std::size_t n) {
    while (points_.size() < n) {
      const double r = uniform(0.0, 1.0);
      if (r < 0.25 && !polygons_.empty()) {
        // Inside a polygon; blocks are favoured so they collect many subjects.
        const Geometry& poly = (chance(0.5) && !blocks_.empty())
                                   ? polygons_[pick(blocks_.size())].geometry  // blocks come first
                                   : polygons_[pick(polygons_.size())].geometry;
        const BBox box = bbox(poly);
        for (int attempt = 0; attempt < 20; ++attempt) {
          const Coordinate c{uniform(box.min_x, box.max_x), uniform(box.min_y, box.max_y)};
          if (locate(c, poly) == Location::Interior) {
            add_point(c, "poi");
            break;
          }
        }
      } else if (r < 0.33 && !polygons_.empty()) {
        const auto& ring = polygons_[pick(polygons_.size())].geometry.as_polygon().exterior;
        add_point(ring[pick(ring.size() - 1)], "poi");
      } else if (r < 0.45 && !lines_.empty()) {
        const auto& path = line_path(pick(lines_.size()));
        add_point(chance(0.5) ? path.front() : path.back(), "intersection");
      } else if (r < 0.57 && !lines_.empty()) {
        const auto& path = line_path(pick(lines_.size()));
        if (path.size() < 3) continue;
        add_point(path[1 + pick(path.size() - 2)], "intersection");
      } else if (r < 0.72 && !points_.empty()) {
        const Coordinate c = points_[pick(points_.size())].geometry.as_point().coord;
        add_point(clamp_to_study({c.x + uniform(-0.002, 0.002), c.y + uniform(-0.002, 0.002)}), "poi");
      } else {
        add_point(uniform_point(), "poi");
      }
    }
  }

  const BuilderConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<GeometryRecord> points_, lines_, polygons_;
  std::vector<Rect> rects_, blocks_;
};

}  // namespace synth_detail

/// Duplicates up to `per_type` records of each geometry type under new ids
/// ("<id>_dup"), so that equals pairs exist in the data.
inline std::vector<GeometryRecord> add_equal_duplicates(std::vector<GeometryRecord> records, std::size_t per_type,
                                                        std::mt19937_64& rng) {
  std::array<std::vector<std::size_t>, kGeometryKindCount> by_type;
  for (std::size_t i = 0; i < records.size(); ++i)
    by_type[static_cast<int>(records[i].geometry.kind())].push_back(i);
  const std::size_t original = records.size();
  for (const auto& positions : by_type)
    for (std::size_t i : seeded_sample(positions, per_type, rng)) {
      if (i >= original) continue;
      GeometryRecord dup = records[i];
      dup.id += "_dup";
      dup.source = "duplicate";
      records.push_back(std::move(dup));
    }
  return records;
}

/// Deterministic synthetic stand-in for the point / line / polygon sources.
/// Produces samples_per_type records of each type plus triplet_quota exact
/// duplicates per type (equals pairs).
inline std::vector<GeometryRecord> generate_synthetic(const BuilderConfig& cfg) {
  cfg.validate();
  if (cfg.samples_per_type == 0) return {};
  const auto& b = cfg.study_bbox;
  if (b.width() < 0.02 || b.height() < 0.02)
    throw ConfigError("study bbox must span at least 0.02 degrees on each axis");
  if (static_cast<double>(cfg.samples_per_type) * 0.0005 * 0.0005 > b.width() * b.height())
    throw ConfigError("study bbox too small for the requested sample count");
  auto records = synth_detail::Generator(cfg).run();
  auto rng = stage_rng(cfg.seed, 2);
  return add_equal_duplicates(std::move(records), std::min(cfg.triplet_quota, cfg.samples_per_type), rng);
}

/// Loaded source records: keeps those whose bbox meets the study bbox, draws
/// samples_per_type of each type, then adds the equals duplicates.
inline std::vector<GeometryRecord> sample_records(const std::vector<GeometryRecord>& records, const BuilderConfig& cfg) {
  cfg.validate();
  std::array<std::vector<GeometryRecord>, kGeometryKindCount> by_type;
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) throw DataError("duplicate record id '" + r.id + "'");
    if (bbox(r.geometry).intersects(cfg.study_bbox)) by_type[static_cast<int>(r.geometry.kind())].push_back(r);
  }
  auto rng = stage_rng(cfg.seed, 1);
  std::vector<GeometryRecord> out;
  for (const auto& group : by_type)
    for (auto& r : seeded_sample(group, cfg.samples_per_type, rng)) out.push_back(std::move(r));
  auto dup_rng = stage_rng(cfg.seed, 2);
  return add_equal_duplicates(std::move(out), std::min(cfg.triplet_quota, cfg.samples_per_type), dup_rng);
}

// ---------------------------------------------------------------------------
// Ground truth tables

struct GeometryAttributeRecord {
  std::string id;
  GeometryKind geom_type;
  double area;
  Coordinate centroid;
};

inline std::vector<GeometryAttributeRecord> build_attribute_table(const std::vector<GeometryRecord>& records) {
  std::vector<GeometryAttributeRecord> out;
  out.reserve(records.size());
  for (const auto& r : records)
    out.push_back({r.id, r.geometry.kind(), area(r.geometry), centroid(r.geometry)});
  return out;
}

struct RelationTriplet {
  std::string subject_id;
  Predicate predicate;
  std::string object_id;
  double distance;

  friend bool operator==(const RelationTriplet&, const RelationTriplet&) = default;
};

/// Every ordered pair of distinct records within the near radius, with its
/// single-label relation and distance. Shared by triplet and query building.
struct NeighbourRelation {
  std::size_t subject;
  std::size_t object;
  Predicate predicate;
  double distance;
};

inline std::vector<NeighbourRelation> compute_neighbour_relations(const std::vector<GeometryRecord>& records,
                                                                  double radius, double cell) {
  if (radius < 0.0) throw ConfigError("join radius must be non-negative");
  const GridIndex idx = build_index(records, cell);
  const double pad = radius * (1.0 + 1e-9) + 1e-12;
  std::vector<NeighbourRelation> out;
  for (std::size_t s = 0; s < records.size(); ++s) {
    const Geometry& a = records[s].geometry;
    for (std::size_t o : idx.query(bbox(a).expanded(pad))) {
      if (s == o) continue;
      const Geometry& b = records[o].geometry;
      const double d = min_distance(a, b);
      if (d > radius) continue;
      out.push_back({s, o, d > 0.0 ? Predicate::Disjoint : classify_relation(a, b), d});
    }
  }
  return out;
}

/// Whether a single-label predicate can hold between the two types.
inline bool predicate_feasible(Predicate p, GeometryKind s, GeometryKind o) noexcept {
  const int ds = dimension(s), d_o = dimension(o);
  switch (p) {
    case Predicate::Disjoint: return true;
    case Predicate::Equals: return s == o;
    case Predicate::Touches: return !(ds == 0 && d_o == 0);
    case Predicate::Crosses: return ds + d_o >= 2 && !(ds == 2 && d_o == 2) && ds != 0 && d_o != 0;
    case Predicate::Overlaps: return s == o && ds > 0;
    case Predicate::Contains: return ds >= d_o && ds > 0;
    case Predicate::Within: return ds <= d_o && d_o > 0;
    default: return false;
  }
}

struct CategoryCount {
  std::size_t available = 0;
  std::size_t kept = 0;
};

/// Build metadata: per-category counts and quota shortfalls.
struct BuildReport {
  std::map<std::string, CategoryCount> triplet_categories;  // "Point|within|Polygon"
  std::map<std::string, CategoryCount> query_categories;    // "within|Polygon"
  std::vector<std::string> warnings;
};

inline std::string category_key(GeometryKind s, Predicate p, GeometryKind o) {
  return std::string(to_string(s)) + "|" + std::string(to_string(p)) + "|" + std::string(to_string(o));
}

/// The seven predicate classes used for triplets.
inline constexpr std::array<Predicate, 7> kTripletPredicates = {
    Predicate::Equals, Predicate::Disjoint, Predicate::Crosses, Predicate::Touches,
    Predicate::Contains, Predicate::Within, Predicate::Overlaps};

inline std::vector<RelationTriplet> build_relation_triplets(const std::vector<GeometryRecord>& records,
                                                            const std::vector<NeighbourRelation>& neighbours,
                                                            const BuilderConfig& cfg, BuildReport* report = nullptr) {
  cfg.validate();
  using Key = std::tuple<int, int, int>;  // subject kind, predicate, object kind
  std::map<Key, std::vector<std::pair<std::size_t, std::size_t>>> candidates;
  for (const auto& n : neighbours) {
    if (n.distance > 0.0 || n.predicate == Predicate::Intersects || n.predicate == Predicate::Disjoint) continue;
    const Key key{static_cast<int>(records[n.subject].geometry.kind()), static_cast<int>(n.predicate),
                  static_cast<int>(records[n.object].geometry.kind())};
    candidates[key].emplace_back(n.subject, n.object);
  }

  auto rng = stage_rng(cfg.seed, 3);
  std::vector<RelationTriplet> out;
  auto emit = [&](std::size_t s, std::size_t o, Predicate p) {
    out.push_back({records[s].id, p, records[o].id, min_distance(records[s].geometry, records[o].geometry)});
  };
  auto note = [&](GeometryKind sk, Predicate p, GeometryKind ok, std::size_t available, std::size_t kept) {
    if (!report) return;
    const std::string key = category_key(sk, p, ok);
    report->triplet_categories[key] = {available, kept};
    if (kept < cfg.triplet_quota)
      report->warnings.push_back("triplet shortfall " + key + ": " + std::to_string(kept) + " of " +
                                 std::to_string(cfg.triplet_quota));
  };

  std::array<std::vector<std::size_t>, kGeometryKindCount> by_type;
  for (std::size_t i = 0; i < records.size(); ++i) by_type[static_cast<int>(records[i].geometry.kind())].push_back(i);

  for (int sk = 0; sk < kGeometryKindCount; ++sk) {
    for (int ok = 0; ok < kGeometryKindCount; ++ok) {
      for (Predicate p : kTripletPredicates) {
        if (!predicate_feasible(p, static_cast<GeometryKind>(sk), static_cast<GeometryKind>(ok))) continue;
        if (p == Predicate::Disjoint) {
          // Rejection-sample random pairs of this type combination.
          const auto& subj = by_type[sk];
          const auto& obj = by_type[ok];
          std::set<std::pair<std::size_t, std::size_t>> kept;
          if (!subj.empty() && !obj.empty()) {
            const std::size_t max_attempts = 50 * cfg.triplet_quota;
            for (std::size_t attempt = 0; attempt < max_attempts && kept.size() < cfg.triplet_quota; ++attempt) {
              const std::size_t s = subj[std::uniform_int_distribution<std::size_t>(0, subj.size() - 1)(rng)];
              const std::size_t o = obj[std::uniform_int_distribution<std::size_t>(0, obj.size() - 1)(rng)];
              if (s == o || kept.count({s, o})) continue;
              if (classify_relation(records[s].geometry, records[o].geometry) == Predicate::Disjoint)
                kept.insert({s, o});
            }
          }
          for (const auto& [s, o] : kept) emit(s, o, p);
          note(static_cast<GeometryKind>(sk), p, static_cast<GeometryKind>(ok), kept.size(), kept.size());
          continue;
        }
        auto it = candidates.find({sk, static_cast<int>(p), ok});
        if (it == candidates.end()) {
          note(static_cast<GeometryKind>(sk), p, static_cast<GeometryKind>(ok), 0, 0);
          continue;
        }
        auto pairs = it->second;
        std::sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
          return std::tie(records[x.first].id, records[x.second].id) < std::tie(records[y.first].id, records[y.second].id);
        });
        const auto chosen = seeded_sample(pairs, cfg.triplet_quota, rng);
        for (const auto& [s, o] : chosen) emit(s, o, p);
        note(static_cast<GeometryKind>(sk), p, static_cast<GeometryKind>(ok), pairs.size(), chosen.size());
      }
    }
  }
  return out;
}

inline std::vector<RelationTriplet> build_relation_triplets(const std::vector<GeometryRecord>& records,
                                                            const BuilderConfig& cfg, BuildReport* report = nullptr) {
  return build_relation_triplets(records, compute_neighbour_relations(records, 0.0, cfg.grid_cell), cfg, report);
}

struct LocationQuery {
  std::string object_id;
  Predicate predicate;
  std::vector<std::string> answers;  // sorted subject ids

  friend bool operator==(const LocationQuery&, const LocationQuery&) = default;
};

/// Queries (object, predicate) whose answer set has more than
/// cfg.min_subjects subjects; disjoint pairs inside the near radius count
/// as disjoint_but_near and plain disjoint is never queried.
inline std::vector<LocationQuery> build_location_queries(const std::vector<GeometryRecord>& records,
                                                         const std::vector<NeighbourRelation>& neighbours,
                                                         const BuilderConfig& cfg, BuildReport* report = nullptr) {
  cfg.validate();
  std::map<std::pair<std::size_t, Predicate>, std::vector<std::string>> groups;
  for (const auto& n : neighbours) {
    if (n.distance > cfg.near_radius || n.predicate == Predicate::Intersects) continue;
    const Predicate p = n.predicate == Predicate::Disjoint ? Predicate::DisjointButNear : n.predicate;
    groups[{n.object, p}].push_back(records[n.subject].id);
  }

  std::map<std::pair<Predicate, GeometryKind>, std::vector<LocationQuery>> eligible;
  for (auto& [key, subjects] : groups) {
    std::sort(subjects.begin(), subjects.end());
    subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
    if (subjects.size() <= cfg.min_subjects) continue;
    const auto& object = records[key.first];
    eligible[{key.second, object.geometry.kind()}].push_back({object.id, key.second, subjects});
  }

  auto rng = stage_rng(cfg.seed, 4);
  std::vector<LocationQuery> out;
  for (auto& [key, queries] : eligible) {
    std::sort(queries.begin(), queries.end(),
              [](const LocationQuery& a, const LocationQuery& b) { return a.object_id < b.object_id; });
    auto chosen = seeded_sample(queries, cfg.location_objects, rng);
    if (report) {
      const std::string name = std::string(to_string(key.first)) + "|" + std::string(to_string(key.second));
      report->query_categories[name] = {queries.size(), chosen.size()};
      if (chosen.size() < cfg.location_objects)
        report->warnings.push_back("location query shortfall " + name + ": " + std::to_string(chosen.size()) +
                                   " of " + std::to_string(cfg.location_objects));
    }
    for (auto& q : chosen) out.push_back(std::move(q));
  }
  return out;
}

inline std::vector<LocationQuery> build_location_queries(const std::vector<GeometryRecord>& records,
                                                         const BuilderConfig& cfg, BuildReport* report = nullptr) {
  return build_location_queries(records, compute_neighbour_relations(records, cfg.near_radius, cfg.grid_cell), cfg,
                                report);
}

// ---------------------------------------------------------------------------
// Task datasets and splits

enum class TaskId : std::uint8_t { T1 = 1, T2, T3, T4, T5, T6 };

inline std::string_view to_string(TaskId t) noexcept {
  static constexpr std::array<std::string_view, 6> names{"t1", "t2", "t3", "t4", "t5", "t6"};
  return names[static_cast<int>(t) - 1];
}

inline TaskId task_from_string(std::string_view s) {
  for (int i = 1; i <= 6; ++i)
    if (to_string(static_cast<TaskId>(i)) == s) return static_cast<TaskId>(i);
  throw ConfigError("unknown task: " + std::string(s));
}

inline bool is_classification(TaskId t) noexcept { return t == TaskId::T1 || t == TaskId::T4; }

enum class Split : std::uint8_t { Train = 0, Validation = 1, Test = 2 };

inline std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

inline Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw DataError("unknown split: " + std::string(s));
}

/// One supervised example. `inputs` are record ids (T1-T5) or
/// {predicate, object id} (T6); `group` carries the attribute that task
/// variants filter on (geometry type for T1-T3, "Subj|Obj" types for T4,
/// predicate for T5 and T6).
struct Example {
  std::string id;
  std::vector<std::string> inputs;
  std::string label;            // classification target
  std::vector<double> values;   // regression target
  std::vector<std::string> answers;  // retrieval target
  std::string group;
  Split split = Split::Train;

  friend bool operator==(const Example&, const Example&) = default;
};

struct TaskDataset {
  TaskId task = TaskId::T1;
  std::vector<Example> examples;

  friend bool operator==(const TaskDataset&, const TaskDataset&) = default;
};

inline TaskDataset make_attribute_dataset(TaskId task, const std::vector<GeometryAttributeRecord>& attrs) {
  TaskDataset ds{task, {}};
  for (const auto& a : attrs) {
    Example e;
    e.id = a.id;
    e.inputs = {a.id};
    e.group = std::string(to_string(a.geom_type));
    if (task == TaskId::T1) e.label = e.group;
    else if (task == TaskId::T2) e.values = {a.area};
    else if (task == TaskId::T3) e.values = {a.centroid.x, a.centroid.y};
    else throw ConfigError("attribute datasets cover t1-t3 only");
    ds.examples.push_back(std::move(e));
  }
  return ds;
}

inline TaskDataset make_relation_dataset(TaskId task, const std::vector<RelationTriplet>& triplets,
                                         const std::unordered_map<std::string, GeometryKind>& kinds) {
  if (task != TaskId::T4 && task != TaskId::T5) throw ConfigError("relation datasets cover t4-t5 only");
  TaskDataset ds{task, {}};
  for (const auto& t : triplets) {
    Example e;
    e.id = t.subject_id + "|" + std::string(to_string(t.predicate)) + "|" + t.object_id;
    e.inputs = {t.subject_id, t.object_id};
    if (task == TaskId::T4) {
      e.label = std::string(to_string(t.predicate));
      e.group = std::string(to_string(kinds.at(t.subject_id))) + "|" + std::string(to_string(kinds.at(t.object_id)));
    } else {
      e.values = {t.distance};
      e.group = std::string(to_string(t.predicate));
    }
    ds.examples.push_back(std::move(e));
  }
  return ds;
}

inline TaskDataset make_location_dataset(const std::vector<LocationQuery>& queries) {
  TaskDataset ds{TaskId::T6, {}};
  for (const auto& q : queries) {
    Example e;
    e.id = q.object_id + "|" + std::string(to_string(q.predicate));
    e.inputs = {std::string(to_string(q.predicate)), q.object_id};
    e.answers = q.answers;
    e.group = std::string(to_string(q.predicate));
    e.split = Split::Test;  // retrieval involves no training
    ds.examples.push_back(std::move(e));
  }
  return ds;
}

namespace split_detail {

/// Largest-remainder apportionment of n items over the ratios.
inline std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> rem{};
  std::size_t used = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(n) * ratios[i];
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(counts[i]);
    used += counts[i];
  }
  while (used < n) {
    const int best = static_cast<int>(std::max_element(rem.begin(), rem.end()) - rem.begin());
    ++counts[best];
    rem[best] = -1.0;
    ++used;
  }
  return counts;
}

}  // namespace split_detail

/// Seeded shuffle then contiguous train/validation/test assignment.
/// Classification tasks (T1, T4) are stratified by label and every split
/// receives at least one example of each class.
inline TaskDataset split(TaskDataset ds, const std::array<double, 3>& ratios, std::uint64_t seed) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  if (ds.task == TaskId::T6) {
    for (auto& e : ds.examples) e.split = Split::Test;
    return ds;
  }
  std::mt19937_64 rng = stage_rng(seed, 100 + static_cast<std::uint64_t>(ds.task));
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < ds.examples.size(); ++i)
    strata[is_classification(ds.task) ? ds.examples[i].label : std::string()].push_back(i);

  for (auto& [label, members] : strata) {
    if (is_classification(ds.task) && members.size() < 3)
      throw ConfigError("class '" + label + "' has fewer examples than splits");
    std::shuffle(members.begin(), members.end(), rng);
    auto counts = split_detail::apportion(members.size(), ratios);
    if (is_classification(ds.task))
      for (auto& c : counts)
        if (c == 0) {
          --*std::max_element(counts.begin(), counts.end());
          c = 1;
        }
    std::size_t pos = 0;
    for (int s = 0; s < 3; ++s)
      for (std::size_t k = 0; k < counts[s]; ++k) ds.examples[members[pos++]].split = static_cast<Split>(s);
  }
  return ds;
}

}  // namespace geoprobe
