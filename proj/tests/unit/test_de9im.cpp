#include <gtest/gtest.h>

#include "geoprobe/de9im.hpp"
#include "geoprobe/wkt.hpp"
#include "oracle_corpus.hpp"

using namespace geoprobe;

namespace {

const Geometry kUnitSquare = parse_wkt("POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))");

std::string relate(std::string_view a, std::string_view b) {
  return de9im(parse_wkt(a), parse_wkt(b)).to_string();
}

}  // namespace

// Expected matrices below were produced by GEOS 3.13 (shapely relate).
TEST(De9im, Examples) {
  EXPECT_EQ(de9im(parse_wkt("POINT (0.5 0.5)"), kUnitSquare).to_string(), "0FFFFF212");
  EXPECT_EQ(relate("POINT (0 0)", "POINT (5 5)"), "FF0FFF0F2");
  EXPECT_EQ(de9im(kUnitSquare, kUnitSquare).to_string(), "2FFF1FFF2");
  EXPECT_EQ(de9im(kUnitSquare, parse_wkt("POLYGON ((1 0, 1 1, 2 1, 2 0, 1 0))")).to_string(), "FF2F11212");
}

TEST(De9im, LineCases) {
  EXPECT_EQ(relate("LINESTRING (0 0, 2 2)", "LINESTRING (0 2, 2 0)"), "0F1FF0102");
  EXPECT_EQ(relate("LINESTRING (0 0, 2 0)", "LINESTRING (1 0, 3 0)"), "1010F0102");
  EXPECT_EQ(relate("LINESTRING (0 0, 1 0)", "LINESTRING (1 0, 1 1)"), "FF1F00102");
  EXPECT_EQ(relate("LINESTRING (-1 0.5, 2 0.5)", "POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))"), "101FF0212");
  EXPECT_EQ(relate("LINESTRING (0.2 0.2, 0.8 0.8)", "POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))"), "1FF0FF212");
  EXPECT_EQ(relate("LINESTRING (0 0, 1 0)", "POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))"), "F1FF0F212");
  EXPECT_EQ(relate("LINESTRING (0 0, 1 0, 1 1, 0 0)", "POINT (0 0)"), "0F1FFFFF2");
  EXPECT_EQ(relate("POINT (0 0)", "LINESTRING (0 0, 2 2)"), "F0FFFF102");
}

TEST(De9im, PolygonWithHole) {
  const char* holed = "POLYGON ((0 0, 10 0, 10 10, 0 10, 0 0), (2 2, 8 2, 8 8, 2 8, 2 2))";
  EXPECT_EQ(relate("POINT (5 5)", holed), "FF0FFF212");
  EXPECT_EQ(relate("POLYGON ((3 3, 7 3, 7 7, 3 7, 3 3))", holed), "FF2FF1212");
  EXPECT_EQ(relate("POLYGON ((2 2, 8 2, 8 8, 2 8, 2 2))", holed), "FF2F1F212");
}

TEST(De9im, SelfIntersectingRingIsDegenerate) {
  EXPECT_THROW(de9im(parse_wkt("POLYGON ((0 0, 2 2, 2 0, 0 2, 0 0))"), kUnitSquare), DegenerateGeometry);
}

TEST(NamedPredicates, Examples) {
  using P = Predicate;
  EXPECT_EQ(named_predicates(DE9IMMatrix::from_string("0FFFFF212"), GeometryKind::Point, GeometryKind::Polygon),
            (PredicateSet{P::Within, P::Intersects}));
  EXPECT_EQ(named_predicates(DE9IMMatrix::from_string("FF0FFF0F2"), GeometryKind::Point, GeometryKind::Point),
            (PredicateSet{P::Disjoint}));
  EXPECT_EQ(named_predicates(DE9IMMatrix::from_string("2FFF1FFF2"), GeometryKind::Polygon, GeometryKind::Polygon),
            (PredicateSet{P::Equals, P::Within, P::Contains, P::Intersects}));
}

TEST(NamedPredicates, DimensionDispatch) {
  using P = Predicate;
  const auto m = DE9IMMatrix::from_string("0F1FF0102");
  EXPECT_TRUE(named_predicates(m, GeometryKind::LineString, GeometryKind::LineString).contains(P::Crosses));
  // Overlaps is undefined across dimensions and crosses is undefined for area/area.
  const auto area_pair = DE9IMMatrix::from_string("212101212");
  EXPECT_TRUE(named_predicates(area_pair, GeometryKind::Polygon, GeometryKind::Polygon).contains(P::Overlaps));
  EXPECT_FALSE(named_predicates(area_pair, GeometryKind::Polygon, GeometryKind::Polygon).contains(P::Crosses));
  const auto line_poly = DE9IMMatrix::from_string("101FF0212");
  EXPECT_TRUE(named_predicates(line_poly, GeometryKind::LineString, GeometryKind::Polygon).contains(P::Crosses));
  EXPECT_FALSE(named_predicates(line_poly, GeometryKind::LineString, GeometryKind::Polygon).contains(P::Overlaps));
}

TEST(ClassifyRelation, Examples) {
  EXPECT_EQ(classify_relation(parse_wkt("POINT (0.5 0.5)"), kUnitSquare), Predicate::Within);
  EXPECT_EQ(classify_relation(kUnitSquare, parse_wkt("POLYGON ((1 0, 1 1, 2 1, 2 0, 1 0))")), Predicate::Touches);
  EXPECT_EQ(classify_relation(kUnitSquare, kUnitSquare), Predicate::Equals);
  EXPECT_EQ(classify_relation(kUnitSquare, parse_wkt("POINT (0.5 0.5)")), Predicate::Contains);
  EXPECT_EQ(classify_relation(kUnitSquare, parse_wkt("POINT (5 5)")), Predicate::Disjoint);
}

TEST(DisjointButNear, Examples) {
  const Geometry a = Geometry::rectangle(0, 0, 0.001, 0.001);
  EXPECT_TRUE(is_disjoint_but_near(a, Geometry::rectangle(0.002, 0, 0.003, 0.001), 0.003));
  EXPECT_FALSE(is_disjoint_but_near(a, Geometry::rectangle(0.011, 0, 0.012, 0.001), 0.003));
  EXPECT_FALSE(is_disjoint_but_near(a, Geometry::rectangle(0.001, 0, 0.002, 0.001), 0.003));
  EXPECT_THROW(is_disjoint_but_near(a, a, 0.0), ConfigError);
}

TEST(De9imAlgebra, PropertiesOnCorpus) {
  for (const auto& row : geoprobe::test_support::load_oracle_pairs()) {
    const auto ab = de9im(row.a, row.b);
    const auto ba = de9im(row.b, row.a);
    ASSERT_EQ(ab, ba.transposed()) << format_wkt(row.a) << " | " << format_wkt(row.b);
    const auto pab = named_predicates(ab, row.a.kind(), row.b.kind());
    const auto pba = named_predicates(ba, row.b.kind(), row.a.kind());
    EXPECT_EQ(pab.contains(Predicate::Within), pba.contains(Predicate::Contains));
    EXPECT_EQ(pab.contains(Predicate::Equals),
              pab.contains(Predicate::Within) && pab.contains(Predicate::Contains));
    EXPECT_NE(pab.contains(Predicate::Intersects), pab.contains(Predicate::Disjoint));
    EXPECT_EQ(min_distance(row.a, row.b) > 0.0, pab.contains(Predicate::Disjoint));
  }
}

TEST(De9imOracle, MatricesMatchGeos) {
  int mismatches = 0;
  for (const auto& row : geoprobe::test_support::load_oracle_pairs()) {
    const std::string got = de9im(row.a, row.b).to_string();
    if (got != row.relate) {
      ++mismatches;
      ADD_FAILURE() << format_wkt(row.a) << " | " << format_wkt(row.b) << " got " << got << " want " << row.relate;
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(De9imOracle, ClassifyRelationMatchesGeos) {
  for (const auto& row : geoprobe::test_support::load_oracle_pairs())
    EXPECT_EQ(to_string(classify_relation(row.a, row.b)), row.label) << format_wkt(row.a) << " | " << format_wkt(row.b);
}
