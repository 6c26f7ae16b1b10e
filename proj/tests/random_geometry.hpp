#pragma once

#include <random>
#include <vector>

#include "geoprobe/geometry.hpp"

namespace geoprobe::test_support {

// Arbitrary (not necessarily valid-topology) geometries for parser and
// serialization properties. Coordinates mix integers, short decimals and
// full-precision doubles across several magnitudes.
class RandomGeometry {
public:
  explicit RandomGeometry(std::uint64_t seed) : rng_(seed) {}

  double number() {
    switch (std::uniform_int_distribution<int>(0, 4)(rng_)) {
      case 0: return static_cast<double>(std::uniform_int_distribution<int>(-180, 180)(rng_));
      case 1: return std::uniform_int_distribution<int>(-18000, 18000)(rng_) / 100.0;
      case 2: return std::uniform_real_distribution<double>(-180.0, 180.0)(rng_);
      case 3: return std::uniform_real_distribution<double>(-1e-6, 1e-6)(rng_);
      default: return std::uniform_real_distribution<double>(-1e9, 1e9)(rng_);
    }
  }

  Coordinate coord() { return {number(), number()}; }

  Ring ring() {
    const int n = std::uniform_int_distribution<int>(3, 9)(rng_);
    Ring r;
    for (int i = 0; i < n; ++i) r.push_back(coord());
    r.push_back(r.front());
    return r;
  }

  Geometry any() {
    switch (std::uniform_int_distribution<int>(0, 2)(rng_)) {
      case 0: return Geometry::point(coord());
      case 1: {
        const int n = std::uniform_int_distribution<int>(2, 12)(rng_);
        std::vector<Coordinate> path;
        for (int i = 0; i < n; ++i) path.push_back(coord());
        return Geometry::line_string(std::move(path));
      }
      default: {
        std::vector<Ring> holes(std::uniform_int_distribution<int>(0, 2)(rng_));
        for (auto& h : holes) h = ring();
        return Geometry::polygon(ring(), std::move(holes));
      }
    }
  }

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

// Small valid geometries scattered over a city-sized box, for index and join
// properties. Shapes are sized so that many pairs fall within 0.003 degrees.
inline std::vector<GeometryRecord> city_records(std::size_t n, std::uint64_t seed, const char* prefix = "r") {
  std::mt19937_64 rng(seed);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::vector<GeometryRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Coordinate c{u(-89.42, -89.40), u(43.07, 43.09)};
    Geometry g = Geometry::point(c);
    switch (i % 3) {
      case 1: {
        std::vector<Coordinate> path{c};
        const int k = std::uniform_int_distribution<int>(1, 5)(rng);
        for (int j = 0; j < k; ++j) path.push_back({path.back().x + u(-5e-4, 5e-4), path.back().y + u(-5e-4, 5e-4)});
        g = Geometry::line_string(std::move(path));
        break;
      }
      case 2: {
        const double w = u(1e-4, 2e-3), h = u(1e-4, 2e-3);
        g = Geometry::rectangle(c.x, c.y, c.x + w, c.y + h);
        break;
      }
      default: break;
    }
    out.push_back({prefix + std::to_string(i), std::move(g), "test"});
  }
  return out;
}

}  // namespace geoprobe::test_support
