#include <gtest/gtest.h>

#include <random>

#include "escape/geometry.hpp"

using namespace escape;

namespace {

Polygon square(double x0, double y0, double w) { return {{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + w}, {x0, y0 + w}}; }

}  // namespace

TEST(Geometry, AreaAndCentroid) {
  const Polygon p = square(0.1, 0.2, 0.5);
  EXPECT_NEAR(signed_area(p), 0.25, 1e-15);
  Polygon q(p.rbegin(), p.rend());
  EXPECT_LT(signed_area(q), 0);
  make_ccw(q);
  EXPECT_GT(signed_area(q), 0);
  EXPECT_NEAR(centroid(p).x, 0.35, 1e-15);
  EXPECT_NEAR(centroid(p).y, 0.45, 1e-15);
}

TEST(Geometry, ClipHalfplaneKeepsLowerSide) {
  const Polygon c = clip_halfplane(square(0, 0, 1), {1, 0}, 0.3);
  EXPECT_NEAR(area(c), 0.3, 1e-15);
  EXPECT_TRUE(clip_halfplane(square(0, 0, 1), {1, 0}, -0.1).empty());
}

TEST(Geometry, ConvexIntersectionOfSquares) {
  EXPECT_NEAR(intersection_area(square(0, 0, 1), square(0.5, 0.5, 1)), 0.25, 1e-15);
  EXPECT_NEAR(intersection_area(square(0, 0, 1), square(2, 2, 1)), 0.0, 0.0);
  // Rotated square inside the unit square: area 0.5.
  const Polygon diamond{{0.5, 0}, {1, 0.5}, {0.5, 1}, {0, 0.5}};
  EXPECT_NEAR(intersection_area(square(0, 0, 1), diamond), 0.5, 1e-15);
}

TEST(Geometry, IntersectionAreaMatchesMonteCarlo) {
  const Polygon a{{0.1, 0.1}, {0.9, 0.3}, {0.6, 0.8}};
  const Polygon b = square(0.3, 0.2, 0.5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 400000;
  int hit = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2 q{u(rng), u(rng)};
    hit += inside_or_on(a, q) && inside_or_on(b, q);
  }
  const double p = double(hit) / n, se = std::sqrt(p * (1 - p) / n);
  EXPECT_NEAR(intersection_area(a, b), p, 4 * se);
}

TEST(Geometry, InsideTests) {
  const Polygon p = square(0, 0, 1);
  EXPECT_TRUE(strictly_inside(p, {0.5, 0.5}));
  EXPECT_FALSE(strictly_inside(p, {0.0, 0.5}));
  EXPECT_TRUE(inside_or_on(p, {0.0, 0.5}));
  EXPECT_FALSE(inside_or_on(p, {1.01, 0.5}));
}

TEST(Geometry, SegmentDistances) {
  EXPECT_NEAR(point_segment_distance({0.5, 1}, {{0, 0}, {1, 0}}), 1.0, 1e-15);
  EXPECT_NEAR(point_segment_distance({2, 0}, {{0, 0}, {1, 0}}), 1.0, 1e-15);
  EXPECT_TRUE(segments_intersect({{0, 0}, {1, 1}}, {{0, 1}, {1, 0}}));
  EXPECT_NEAR(segment_distance({{0, 0}, {1, 0}}, {{0, 0.5}, {1, 0.5}}), 0.5, 1e-15);
  EXPECT_EQ(segment_polygon_distance({{0.2, 0.2}, {0.4, 0.4}}, square(0, 0, 1)), 0.0);
  EXPECT_NEAR(segment_polygon_distance({{2, 0}, {2, 1}}, square(0, 0, 1)), 1.0, 1e-15);
}

TEST(Geometry, MatrixInverse) {
  const Mat2 m{2, 1, 1, 1};
  const Mat2 i = m * m.inverse();
  EXPECT_NEAR(i.a, 1, 1e-15);
  EXPECT_NEAR(i.b, 0, 1e-15);
  EXPECT_NEAR(i.c, 0, 1e-15);
  EXPECT_NEAR(i.d, 1, 1e-15);
}
