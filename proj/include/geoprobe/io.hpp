#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "geoprobe/dataset.hpp"
#include "geoprobe/errors.hpp"
#include "geoprobe/geometry.hpp"
#include "geoprobe/wkt.hpp"

namespace geoprobe {

namespace io_detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

inline std::vector<std::string> split_list(std::string_view field, char sep) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  for (auto part : split_fields(field, sep)) out.emplace_back(part);
  return out;
}

inline std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError(where + ": bad number '" + std::string(s) + "'");
  return v;
}

inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

/// Calls f(fields, location) for every non-blank, non-comment line.
template <typename F>
void for_each_row(const std::filesystem::path& path, std::size_t min_fields, F&& f) {
  auto in = open_in(path);
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line, '\t');
    const std::string where = path.filename().string() + ":" + std::to_string(n);
    if (fields.size() < min_fields) throw DataError(where + ": expected " + std::to_string(min_fields) + " fields");
    f(fields, where);
  }
}

}  // namespace io_detail

// WKT-lines: "<id>\t<wkt>\t<source>"

inline void write_records(const std::filesystem::path& path, const std::vector<GeometryRecord>& records) {
  auto out = io_detail::open_out(path);
  for (const auto& r : records) out << r.id << '\t' << format_wkt(r.geometry) << '\t' << r.source << '\n';
}

inline std::vector<GeometryRecord> read_records(const std::filesystem::path& path) {
  std::vector<GeometryRecord> out;
  io_detail::for_each_row(path, 2, [&](const auto& f, const std::string& where) {
    try {
      out.push_back({std::string(f[0]), parse_wkt(f[1]), f.size() > 2 ? std::string(f[2]) : std::string()});
    } catch (const Error& e) {
      throw DataError(where + ": " + e.what());
    }
  });
  return out;
}

/// GeoJSON FeatureCollection of Point / LineString / Polygon features. Ids
/// come from the feature "id" member, else the feature index.
inline std::vector<GeometryRecord> read_geojson(const std::filesystem::path& path, const std::string& source) {
  nlohmann::json doc;
  try {
    auto in = io_detail::open_in(path);
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features") || !doc["features"].is_array())
    throw DataError(path.string() + ": not a FeatureCollection");

  auto coord = [](const nlohmann::json& c) -> Coordinate {
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
      throw DataError("coordinates must be [x, y] pairs");
    return {c[0].get<double>(), c[1].get<double>()};
  };
  auto sequence = [&](const nlohmann::json& arr) {
    if (!arr.is_array()) throw DataError("coordinate sequence must be an array");
    std::vector<Coordinate> out;
    for (const auto& c : arr) out.push_back(coord(c));
    return out;
  };

  std::vector<GeometryRecord> out;
  const auto& features = doc["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& feat = features[i];
    const std::string where = path.filename().string() + " feature " + std::to_string(i);
    try {
      const auto& geom = feat.at("geometry");
      const std::string type = geom.at("type").get<std::string>();
      const auto& coords = geom.at("coordinates");
      std::optional<Geometry> g;
      if (type == "Point") g = Geometry::point(coord(coords));
      else if (type == "LineString") g = Geometry::line_string(sequence(coords));
      else if (type == "Polygon") {
        if (!coords.is_array() || coords.empty()) throw DataError("polygon without rings");
        std::vector<Ring> holes;
        for (std::size_t r = 1; r < coords.size(); ++r) holes.push_back(sequence(coords[r]));
        g = Geometry::polygon(sequence(coords[0]), std::move(holes));
      } else {
        throw UnsupportedType("geometry type " + type);
      }
      std::string id = std::to_string(i);
      if (feat.contains("id")) id = feat["id"].is_string() ? feat["id"].get<std::string>() : feat["id"].dump();
      out.push_back({std::move(id), std::move(*g), source});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    } catch (const Error& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

// Attribute table: "<id>\t<type>\t<area>\t<cx>\t<cy>"

inline void write_attributes(const std::filesystem::path& path, const std::vector<GeometryAttributeRecord>& rows) {
  auto out = io_detail::open_out(path);
  for (const auto& r : rows)
    out << r.id << '\t' << to_string(r.geom_type) << '\t' << io_detail::format_double(r.area) << '\t'
        << io_detail::format_double(r.centroid.x) << '\t' << io_detail::format_double(r.centroid.y) << '\n';
}

inline std::vector<GeometryAttributeRecord> read_attributes(const std::filesystem::path& path) {
  std::vector<GeometryAttributeRecord> out;
  io_detail::for_each_row(path, 5, [&](const auto& f, const std::string& where) {
    try {
      out.push_back({std::string(f[0]), geometry_kind_from_string(f[1]), io_detail::parse_double(f[2], where),
                     {io_detail::parse_double(f[3], where), io_detail::parse_double(f[4], where)}});
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw DataError(where + ": " + e.what());
    }
  });
  return out;
}

// Relation table: "<subject>\t<predicate>\t<object>\t<distance>"

inline void write_triplets(const std::filesystem::path& path, const std::vector<RelationTriplet>& rows) {
  auto out = io_detail::open_out(path);
  for (const auto& t : rows)
    out << t.subject_id << '\t' << to_string(t.predicate) << '\t' << t.object_id << '\t'
        << io_detail::format_double(t.distance) << '\n';
}

inline std::vector<RelationTriplet> read_triplets(const std::filesystem::path& path) {
  std::vector<RelationTriplet> out;
  io_detail::for_each_row(path, 4, [&](const auto& f, const std::string& where) {
    try {
      out.push_back({std::string(f[0]), predicate_from_string(f[1]), std::string(f[2]),
                     io_detail::parse_double(f[3], where)});
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw DataError(where + ": " + e.what());
    }
  });
  return out;
}

// Location queries: "<object>\t<predicate>\t<subject,subject,...>"

inline void write_queries(const std::filesystem::path& path, const std::vector<LocationQuery>& rows) {
  auto out = io_detail::open_out(path);
  for (const auto& q : rows)
    out << q.object_id << '\t' << to_string(q.predicate) << '\t' << io_detail::join(q.answers, ',') << '\n';
}

inline std::vector<LocationQuery> read_queries(const std::filesystem::path& path) {
  std::vector<LocationQuery> out;
  io_detail::for_each_row(path, 3, [&](const auto& f, const std::string& where) {
    try {
      out.push_back({std::string(f[0]), predicate_from_string(f[1]), io_detail::split_list(f[2], ',')});
    } catch (const Error& e) {
      throw DataError(where + ": " + e.what());
    }
  });
  return out;
}

// Task files: "<id>\t<inputs>\t<target>\t<group>\t<split>" where inputs and
// retrieval answers are comma-separated and regression targets are
// space-separated numbers.

inline void write_task(const std::filesystem::path& path, const TaskDataset& ds) {
  auto out = io_detail::open_out(path);
  out << "# task " << to_string(ds.task) << '\n';
  for (const auto& e : ds.examples) {
    out << e.id << '\t' << io_detail::join(e.inputs, ',') << '\t';
    if (is_classification(ds.task)) {
      out << e.label;
    } else if (ds.task == TaskId::T6) {
      out << io_detail::join(e.answers, ',');
    } else {
      for (std::size_t i = 0; i < e.values.size(); ++i) out << (i ? " " : "") << io_detail::format_double(e.values[i]);
    }
    out << '\t' << e.group << '\t' << to_string(e.split) << '\n';
  }
}

inline TaskDataset read_task(const std::filesystem::path& path, TaskId task) {
  TaskDataset ds{task, {}};
  io_detail::for_each_row(path, 5, [&](const auto& f, const std::string& where) {
    Example e;
    e.id = std::string(f[0]);
    e.inputs = io_detail::split_list(f[1], ',');
    if (is_classification(task)) {
      e.label = std::string(f[2]);
    } else if (task == TaskId::T6) {
      e.answers = io_detail::split_list(f[2], ',');
    } else {
      for (const auto& v : io_detail::split_list(f[2], ' ')) e.values.push_back(io_detail::parse_double(v, where));
    }
    e.group = std::string(f[3]);
    e.split = split_from_string(f[4]);
    ds.examples.push_back(std::move(e));
  });
  return ds;
}

// Build manifest

inline nlohmann::json config_to_json(const BuilderConfig& c) {
  return {{"study_bbox", {c.study_bbox.min_x, c.study_bbox.min_y, c.study_bbox.max_x, c.study_bbox.max_y}},
          {"samples_per_type", c.samples_per_type},
          {"triplet_quota", c.triplet_quota},
          {"location_objects", c.location_objects},
          {"min_subjects", c.min_subjects},
          {"near_radius", c.near_radius},
          {"split_ratios", c.split_ratios},
          {"seed", c.seed},
          {"grid_cell", c.grid_cell}};
}

/// Missing keys keep their defaults; unknown keys are ignored.
inline BuilderConfig config_from_json(const nlohmann::json& j) {
  BuilderConfig c;
  try {
    if (j.contains("study_bbox")) {
      const auto b = j.at("study_bbox").get<std::vector<double>>();
      if (b.size() != 4) throw ConfigError("study_bbox needs [min_x, min_y, max_x, max_y]");
      c.study_bbox = {b[0], b[1], b[2], b[3]};
    }
    c.samples_per_type = j.value("samples_per_type", c.samples_per_type);
    c.triplet_quota = j.value("triplet_quota", c.triplet_quota);
    c.location_objects = j.value("location_objects", c.location_objects);
    c.min_subjects = j.value("min_subjects", c.min_subjects);
    c.near_radius = j.value("near_radius", c.near_radius);
    if (j.contains("split_ratios")) c.split_ratios = j.at("split_ratios").get<std::array<double, 3>>();
    c.seed = j.value("seed", c.seed);
    c.grid_cell = j.value("grid_cell", c.grid_cell);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline nlohmann::json report_to_json(const BuildReport& r) {
  auto counts = [](const std::map<std::string, CategoryCount>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : m) j[k] = {{"available", v.available}, {"kept", v.kept}};
    return j;
  };
  return {{"triplet_categories", counts(r.triplet_categories)},
          {"query_categories", counts(r.query_categories)},
          {"warnings", r.warnings}};
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    auto in = io_detail::open_in(path);
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = io_detail::open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace geoprobe
