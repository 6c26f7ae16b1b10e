#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoprobe/errors.hpp"
#include "geoprobe/geometry.hpp"

namespace geoprobe {

namespace wkt_detail {

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  Geometry read() {
    skip_ws();
    const std::size_t kw_pos = pos_;
    const std::string kw = upper(word());
    if (kw.empty()) throw SyntaxError("expected geometry keyword", kw_pos);

    skip_ws();
    const std::size_t after_kw = pos_;
    const std::string next = upper(word());
    if (next == "EMPTY") throw EmptyGeometry(kw);
    if (next == "Z" || next == "M" || next == "ZM") throw UnsupportedType(kw + " " + next);
    if (!next.empty()) throw SyntaxError("unexpected word '" + next + "'", after_kw);

    Geometry g = [&] {
      if (kw == "POINT") return read_point();
      if (kw == "LINESTRING") return read_line_string();
      if (kw == "POLYGON") return read_polygon();
      throw UnsupportedType(kw);
    }();

    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError("trailing characters", pos_);
    return g;
  }

private:
  Geometry read_point() {
    expect('(');
    Coordinate c = coordinate();
    expect(')');
    return Geometry::point(c);
  }

  Geometry read_line_string() {
    const std::size_t start = pos_;
    auto path = coordinate_list();
    if (path.size() < 2) throw SyntaxError("LineString needs at least 2 coordinates", start);
    return Geometry::line_string(std::move(path));
  }

  Geometry read_polygon() {
    expect('(');
    std::vector<Ring> rings;
    do {
      const std::size_t start = pos_;
      Ring ring = coordinate_list();
      if (ring.size() < 4) throw SyntaxError("ring needs at least 4 coordinates", start);
      if (!bitwise_equal(ring.front(), ring.back())) throw SyntaxError("unclosed ring", start);
      rings.push_back(std::move(ring));
    } while (accept(','));
    expect(')');
    Ring exterior = std::move(rings.front());
    rings.erase(rings.begin());
    return Geometry::polygon(std::move(exterior), std::move(rings));
  }

  std::vector<Coordinate> coordinate_list() {
    expect('(');
    std::vector<Coordinate> out;
    do {
      out.push_back(coordinate());
    } while (accept(','));
    expect(')');
    return out;
  }

  Coordinate coordinate() {
    Coordinate c;
    c.x = number();
    c.y = number();
    skip_ws();
    if (pos_ < text_.size() && starts_number(text_[pos_]))
      throw SyntaxError("coordinates must have exactly two ordinates", pos_);
    return c;
  }

  double number() {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) throw SyntaxError("expected number", pos_);
    if (!std::isfinite(v)) throw SyntaxError("non-finite number", pos_);
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  static bool starts_number(char ch) {
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '.' || ch == '+';
  }

  std::string word() {
    std::string out;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
      out.push_back(text_[pos_++]);
    return out;
  }

  static std::string upper(std::string s) {
    for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char ch) {
    if (!accept(ch)) throw SyntaxError(std::string("expected '") + ch + "'", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

inline void append_sequence(std::string& out, std::span<const Coordinate> seq) {
  out.push_back('(');
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ", ";
    append_number(out, seq[i].x);
    out.push_back(' ');
    append_number(out, seq[i].y);
  }
  out.push_back(')');
}

}  // namespace wkt_detail

/// Parses POINT, LINESTRING or POLYGON well-known text. Keywords are
/// case-insensitive and whitespace between tokens is free-form.
inline Geometry parse_wkt(std::string_view text) { return wkt_detail::Reader(text).read(); }

/// Canonical WKT: uppercase keyword, shortest round-trip decimals,
/// ", " between coordinates.
inline std::string format_wkt(const Geometry& g) {
  std::string out;
  switch (g.kind()) {
    case GeometryKind::Point:
      out = "POINT ";
      wkt_detail::append_sequence(out, std::span<const Coordinate>(&g.as_point().coord, 1));
      break;
    case GeometryKind::LineString:
      out = "LINESTRING ";
      wkt_detail::append_sequence(out, g.as_line_string().path);
      break;
    case GeometryKind::Polygon: {
      out = "POLYGON (";
      const auto& poly = g.as_polygon();
      wkt_detail::append_sequence(out, poly.exterior);
      for (const auto& hole : poly.holes) {
        out += ", ";
        wkt_detail::append_sequence(out, hole);
      }
      out.push_back(')');
      break;
    }
  }
  return out;
}

}  // namespace geoprobe
