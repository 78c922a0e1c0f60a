#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "escape/dynsys.hpp"
#include "escape/errors.hpp"

using namespace escape;

TEST(Dynsys, CatMapImages) {
  const TorusMap f = TorusMap::cat();
  const Point2 o = apply(f, {0, 0});
  EXPECT_EQ(o.x, 0.0);
  EXPECT_EQ(o.y, 0.0);
  const Point2 p = apply(f, {0.5, 0.5});
  EXPECT_NEAR(p.x, 0.5, 1e-15);
  EXPECT_NEAR(p.y, 0.0, 1e-15);
}

TEST(Dynsys, BakerImage) {
  const Point2 p = apply(BakerMap(2), {0.75, 0.5});
  EXPECT_NEAR(p.x, 0.5, 1e-15);
  EXPECT_NEAR(p.y, 0.75, 1e-15);
}

TEST(Dynsys, CatMapInverse) {
  const TorusMap f = TorusMap::cat();
  const Point2 p = apply_inverse(f, {0.5, 0.0});
  EXPECT_NEAR(p.x, 0.5, 1e-15);
  EXPECT_NEAR(p.y, 0.5, 1e-15);
  const Point2 o = apply_inverse(f, {0, 0});
  EXPECT_EQ(o.x, 0.0);
  EXPECT_EQ(o.y, 0.0);
}

TEST(Dynsys, InverseRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  const Map maps[] = {TorusMap::cat(), TorusMap::negated_cat(), BakerMap(2), BakerMap(3)};
  for (const Map& f : maps)
    for (int i = 0; i < 10000; ++i) {
      const Point2 p{u(rng), u(rng)};
      const Point2 q = apply_inverse(f, apply(f, p));
      ASSERT_LE(torus_distance(p, q), 1e-12);
    }
}

TEST(Dynsys, LogExpansion) {
  EXPECT_NEAR(log_expansion(TorusMap::cat()), 0.9624236501, 1e-10);
  EXPECT_NEAR(log_expansion(TorusMap::cat()), std::log((3 + std::sqrt(5.0)) / 2), 1e-15);
  EXPECT_NEAR(log_expansion(TorusMap::negated_cat()), 0.9624236501, 1e-10);
  EXPECT_NEAR(log_expansion(BakerMap(2)), 0.6931471806, 1e-10);
}

TEST(Dynsys, Orientation) {
  EXPECT_EQ(TorusMap::cat().orientation(), Orientation::preserving);
  EXPECT_EQ(TorusMap::negated_cat().orientation(), Orientation::reversing);
  EXPECT_LT(TorusMap::negated_cat().lambda_u(), -1);
}

TEST(Dynsys, PeriodicPointCounts) {
  const TorusMap f = TorusMap::cat();
  EXPECT_EQ(periodic_points(f, 1).size(), 1u);
  EXPECT_EQ(periodic_points(f, 2).size(), 5u);
  // |det(A^p - I)| = L_{2p} - 2 for the cat map (Lucas numbers).
  EXPECT_EQ(periodic_points(f, 3).size(), 16u);
  EXPECT_EQ(periodic_points(f, 4).size(), 45u);
  for (const TorusMap& g : {TorusMap::cat(), TorusMap::negated_cat()})
    for (int p = 1; p <= 4; ++p) {
      bool origin = false;
      for (const auto& q : periodic_points(g, p)) {
        origin = origin || (q.x == 0 && q.y == 0);
        Point2 r = q;
        for (int i = 0; i < p; ++i) r = apply(g, r);
        EXPECT_LE(torus_distance(r, q), 1e-9);
      }
      EXPECT_TRUE(origin);
    }
}

TEST(Dynsys, EigenDecompositionReconstructsMatrix) {
  for (const TorusMap& f : {TorusMap::cat(), TorusMap::negated_cat(), TorusMap({{{3, 2}, {1, 1}}})}) {
    // A = lu eu eu*^T + ls es es*^T with the dual basis taken from to_eigen.
    const Mat2 lin = f.linear();
    for (const Vec2 v : {Vec2{1, 0}, Vec2{0, 1}}) {
      const Vec2 c = f.to_eigen(v);
      const Vec2 img = f.from_eigen(f.lambda_u() * c.x, f.lambda_s() * c.y);
      const Vec2 want = lin * v;
      EXPECT_NEAR(img.x, want.x, 1e-10);
      EXPECT_NEAR(img.y, want.y, 1e-10);
    }
    EXPECT_NEAR(f.lambda_u() * f.lambda_s(), f.det(), 1e-12);
  }
}

TEST(Dynsys, HyperbolicityGate) {
  EXPECT_THROW(TorusMap({{{1, 0}, {0, 1}}}), ConfigError);
  EXPECT_THROW(TorusMap({{{1, 1}, {0, 1}}}), ConfigError);
  EXPECT_THROW(TorusMap({{{2, 0}, {0, 1}}}), ConfigError);
  EXPECT_THROW(TorusMap({{{1, 1}, {-1, 1}}}), ConfigError);  // det 2
  EXPECT_NO_THROW(TorusMap({{{2, 1}, {1, 1}}}));
}

TEST(Dynsys, AreaPreservation) {
  // Measure of f^-1(B) by Monte Carlo equals area(B).
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 200000;
  for (const Map& f : {Map(TorusMap::cat()), Map(BakerMap(2))}) {
    int hit = 0;
    for (int i = 0; i < n; ++i) {
      const Point2 q = apply(f, {u(rng), u(rng)});
      hit += q.x >= 0.2 && q.x < 0.5 && q.y >= 0.1 && q.y < 0.7;
    }
    const double p = 0.3 * 0.6, se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(double(hit) / n, p, 3 * se) << describe(f);
  }
}

TEST(Dynsys, ExactBakerArithmetic) {
  const BakerMap b(2);
  ExactPoint p{3, 4, 1, 2};  // (3/4, 1/2)
  p = apply_exact(b, p);
  EXPECT_EQ(static_cast<unsigned long long>(p.xnum) * 2, static_cast<unsigned long long>(p.xden));
  EXPECT_EQ(static_cast<unsigned long long>(p.ynum) * 4, static_cast<unsigned long long>(p.yden) * 3);
}

TEST(Dynsys, AffinePiecesCoverTheSquare) {
  for (const Map& f : {Map(TorusMap::cat()), Map(BakerMap(3))}) {
    double total = 0;
    for (const auto& pc : affine_pieces(f)) total += area(pc.domain);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}
