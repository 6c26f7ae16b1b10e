#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>

#include "geoprobe/wkt.hpp"
#include "random_geometry.hpp"
#include "wkt_mutations.hpp"

using namespace geoprobe;

TEST(ParseWkt, LineStringFromDocs) {
  const Geometry g = parse_wkt("LINESTRING (30 10, 10 30, 40 40)");
  ASSERT_TRUE(g.is_line_string());
  const std::vector<Coordinate> expected{{30, 10}, {10, 30}, {40, 40}};
  EXPECT_EQ(g.as_line_string().path, expected);
}

TEST(ParseWkt, MixedCaseUnitSquare) {
  const Geometry g = parse_wkt("Polygon ((0 0, 0 1, 1 1, 1 0, 0 0))");
  ASSERT_TRUE(g.is_polygon());
  EXPECT_EQ(g.as_polygon().exterior.size(), 5u);
  EXPECT_TRUE(g.as_polygon().holes.empty());
}

TEST(ParseWkt, PolygonWithHole) {
  const Geometry g = parse_wkt("POLYGON ((0 0, 10 0, 10 10, 0 10, 0 0), (2 2, 2 4, 4 4, 2 2))");
  ASSERT_EQ(g.as_polygon().holes.size(), 1u);
  EXPECT_EQ(g.as_polygon().holes[0].size(), 4u);
}

TEST(ParseWkt, FlexibleWhitespace) {
  EXPECT_EQ(parse_wkt("  point(30   10) \n"), Geometry::point(30, 10));
  EXPECT_EQ(parse_wkt("LINESTRING(1 2,3 4)"), parse_wkt("LINESTRING ( 1 2 , 3 4 )"));
  EXPECT_EQ(parse_wkt("POINT (1e-3 -2.5E2)"), Geometry::point(0.001, -250));
}

TEST(ParseWkt, Errors) {
  EXPECT_THROW(parse_wkt("POINT (30)"), SyntaxError);
  EXPECT_THROW(parse_wkt("POINT (30 10 5)"), SyntaxError);
  EXPECT_THROW(parse_wkt("LINESTRING (30 10)"), SyntaxError);
  EXPECT_THROW(parse_wkt("POLYGON ((0 0, 0 1, 1 1, 1 0))"), SyntaxError);
  EXPECT_THROW(parse_wkt("POLYGON ((0 0, 1 1, 0 0))"), SyntaxError);
  EXPECT_THROW(parse_wkt("POINT (1 2) extra"), SyntaxError);
  EXPECT_THROW(parse_wkt("POINT (nan 1)"), SyntaxError);
  EXPECT_THROW(parse_wkt(""), SyntaxError);
  EXPECT_THROW(parse_wkt("(1 2)"), SyntaxError);
  EXPECT_THROW(parse_wkt("MULTIPOLYGON (((0 0, 0 1, 1 1, 0 0)))"), UnsupportedType);
  EXPECT_THROW(parse_wkt("GEOMETRYCOLLECTION (POINT (1 2))"), UnsupportedType);
  EXPECT_THROW(parse_wkt("POINT Z (1 2 3)"), UnsupportedType);
  EXPECT_THROW(parse_wkt("POINT EMPTY"), EmptyGeometry);
  EXPECT_THROW(parse_wkt("linestring empty"), EmptyGeometry);
}

TEST(FormatWkt, Canonical) {
  EXPECT_EQ(format_wkt(Geometry::point(30, 10)), "POINT (30 10)");
  EXPECT_EQ(format_wkt(parse_wkt("polygon((0 0,0 1,1 1,1 0,0 0))")), "POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))");
  EXPECT_EQ(format_wkt(Geometry::line_string({{-89.4012, 43.0731}, {0.1, 0.2}})),
            "LINESTRING (-89.4012 43.0731, 0.1 0.2)");
  EXPECT_EQ(format_wkt(parse_wkt("POLYGON ((0 0, 4 0, 4 4, 0 0), (1 1, 2 1, 2 2, 1 1))")),
            "POLYGON ((0 0, 4 0, 4 4, 0 0), (1 1, 2 1, 2 2, 1 1))");
}

TEST(WktProperties, RoundTripAndCaseInsensitivity) {
  test_support::RandomGeometry gen(7);
  for (int i = 0; i < 2000; ++i) {
    const Geometry g = gen.any();
    const std::string text = format_wkt(g);
    ASSERT_EQ(parse_wkt(text), g) << text;
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    ASSERT_EQ(parse_wkt(lower), g) << lower;
  }
}

TEST(WktProperties, StructuralMutationsAreRejected) {
  test_support::RandomGeometry gen(8);
  std::mt19937_64 rng(9);
  int tried = 0;
  for (int i = 0; i < 200; ++i) {
    const std::string text = format_wkt(gen.any());
    for (auto m : test_support::kAllMutations) {
      const std::string bad = test_support::mutate(text, m, rng);
      if (bad.empty()) continue;
      ++tried;
      EXPECT_THROW(parse_wkt(bad), Error) << test_support::to_string(m) << ": " << bad;
    }
  }
  EXPECT_GT(tried, 2000);
}

TEST(GeometryInvariants, FactoriesValidate) {
  EXPECT_THROW(Geometry::line_string({{0, 0}}), InvalidGeometry);
  EXPECT_THROW(Geometry::polygon({{0, 0}, {1, 0}, {0, 0}}), InvalidGeometry);
  EXPECT_THROW(Geometry::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), InvalidGeometry);
  EXPECT_THROW(Geometry::point(std::numeric_limits<double>::infinity(), 0), InvalidGeometry);
  // -0.0 and 0.0 compare equal but a ring must close bitwise.
  EXPECT_THROW(Geometry::polygon({{0.0, 0}, {1, 0}, {1, 1}, {-0.0, 0}}), InvalidGeometry);
}
