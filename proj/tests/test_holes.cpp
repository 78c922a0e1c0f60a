#include <gtest/gtest.h>

#include <random>

#include "escape/errors.hpp"
#include "escape/holes.hpp"
#include "escape/scenarios.hpp"
#include "escape/symbolic.hpp"

using namespace escape;

namespace {

Polygon square(double cx, double cy, double h) {
  return {{cx - h, cy - h}, {cx + h, cy - h}, {cx + h, cy + h}, {cx - h, cy + h}};
}
Hole sq(double cx, double cy, double h) { return Hole(std::vector<Polygon>{square(cx, cy, h)}); }

}  // namespace

TEST(Holes, ContainsIsOpen) {
  const Hole h = sq(0.2, 0.2, 0.1);
  EXPECT_TRUE(h.contains({0.2, 0.2}));
  EXPECT_FALSE(h.contains({0.1, 0.2}));
  EXPECT_FALSE(h.contains({0.5, 0.5}));
}

TEST(Holes, WrapAround) {
  const Hole h = sq(0.99, 0.5, 0.02);
  EXPECT_TRUE(h.contains({0.005, 0.5}));
  EXPECT_TRUE(h.contains({0.98, 0.5}));
  EXPECT_FALSE(h.contains({0.02, 0.5}));
  EXPECT_NEAR(h.area(), 0.0016, 1e-15);
}

TEST(Holes, HausdorffBoundaryDistance) {
  EXPECT_EQ(hausdorff_boundary_distance(sq(0.5, 0.5, 0.1), sq(0.5, 0.5, 0.1)), 0.0);
  EXPECT_NEAR(hausdorff_boundary_distance(sq(0.5, 0.5, 0.1), sq(0.5, 0.5, 0.12)), 0.02 * std::sqrt(2.0), 1e-12);  // corner to corner
  EXPECT_NEAR(hausdorff_boundary_distance(sq(0.5, 0.5, 0.1), sq(0.53, 0.5, 0.1)), 0.03, 1e-12);
}

TEST(Holes, HausdorffTriangleInequality) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(0.2, 0.8), w(0.02, 0.15);
  for (int i = 0; i < 30; ++i) {
    const Hole a = sq(c(rng), c(rng), w(rng)), b = sq(c(rng), c(rng), w(rng)), d = sq(c(rng), c(rng), w(rng));
    EXPECT_LE(hausdorff_boundary_distance(a, d),
              hausdorff_boundary_distance(a, b) + hausdorff_boundary_distance(b, d) + 1e-9);
  }
}

TEST(Holes, SymmetricDifference) {
  EXPECT_NEAR(symmetric_difference_area(sq(0.5, 0.5, 0.1), sq(0.5, 0.5, 0.1)), 0.0, 1e-15);
  EXPECT_NEAR(symmetric_difference_area(sq(0.2, 0.2, 0.05), sq(0.7, 0.7, 0.1)), 0.05, 1e-12);
  EXPECT_NEAR(symmetric_difference_area(sq(0.5, 0.5, 0.1), sq(0.5, 0.5, 0.15)), 0.05, 1e-12);
}

TEST(Holes, AreaMatchesMonteCarlo) {
  const TorusMap f = TorusMap::cat();
  const Hole h = Hole::complement_of({eigen_rect(f, -0.2, 0.3, -0.25, 0.2)}, HoleKind::regular, &f);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 200000;
  int hit = 0;
  for (int i = 0; i < n; ++i) hit += h.contains({u(rng), u(rng)});
  const double p = double(hit) / n;
  EXPECT_NEAR(h.area(), p, 3 * std::sqrt(p * (1 - p) / n));
  EXPECT_NEAR(h.area(), 1 - 0.5 * 0.45, 1e-12);
}

TEST(Holes, RegularHoleThroughFixedPoint) {
  const TorusMap f = TorusMap::cat();
  const Hole on = regular_hole_through_fixed_point(f, Side::right, 0.2, 0.2, 0.0);
  EXPECT_FALSE(on.contains({0, 0}));
  EXPECT_LE(on.boundary_distance(Point2{0, 0}), 1e-12);
  const Hole covers = regular_hole_through_fixed_point(f, Side::right, 0.2, 0.2, -0.01);
  EXPECT_TRUE(covers.contains({0, 0}));
  const Hole off = regular_hole_through_fixed_point(f, Side::left, 0.2, 0.2, 0.01);
  EXPECT_FALSE(off.contains({0, 0}));
  EXPECT_NEAR(off.boundary_distance(Point2{0, 0}), 0.01, 1e-12);
}

TEST(Holes, MarkovHoles) {
  const MarkovPartition p = MarkovPartition::baker(BakerMap(2), 2);
  EXPECT_NEAR(markov_hole({0}, p).area(), 0.25, 1e-15);
  EXPECT_TRUE(markov_hole({0}, p).contains({0.1, 0.5}));
  EXPECT_NEAR(markov_hole({0, 1}, p).area(), 0.5, 1e-15);
  EXPECT_THROW(markov_hole({}, p), ConfigError);
  // Adjacent cells form one strip: the shared seam is not boundary.
  EXPECT_TRUE(markov_hole({0, 1}, p).contains({0.25, 0.5}));
}

TEST(Holes, NestedFamilyIsLipschitz) {
  const TorusMap f = TorusMap::cat();
  const HoleFamily fam = fixtures::devil_family(100);
  EXPECT_TRUE(fam.lipschitz_cert);
  EXPECT_TRUE(fam.monotone_increasing);
  const auto ts = fam.grid();
  ASSERT_EQ(ts.size(), 100u);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const Hole a = fam.at(ts[i - 1]), b = fam.at(ts[i]);
    EXPECT_LE(hausdorff_boundary_distance(a, b), ts[i] - ts[i - 1] + 1e-12);
    EXPECT_GE(b.area(), a.area() - 1e-12);
  }
}

TEST(Holes, SlideFamilyMatchesShiftedWindow) {
  const TorusMap f = TorusMap::cat();
  const HoleFamily fam = fixtures::jump_family(f, 41);
  for (double t : {-0.02, -0.005, 0.0, 0.01}) {
    const Hole h = fam.at(t);
    const Hole want = fixtures::path_hole(f, t);
    EXPECT_NEAR(symmetric_difference_area(h, want), 0.0, 1e-12) << t;
  }
  // t > 0 moves the stable edge off the fixed point, into the hole side.
  EXPECT_TRUE(fam.at(0.01).contains(reduce(f.from_eigen(0.005, 0.0))));
  EXPECT_FALSE(fam.at(-0.01).contains(reduce(f.from_eigen(-0.005, 0.0))));
}

TEST(Holes, OffsetAndSlide) {
  const Polygon p = square(0.5, 0.5, 0.1);
  EXPECT_NEAR(area(offset_convex(p, 0.01)), 0.22 * 0.22, 1e-12);
  EXPECT_NEAR(area(slide_edge(p, 0, 0.05)), 0.2 * 0.25, 1e-12);
  EXPECT_NEAR(min_interior_angle(p), M_PI / 2, 1e-12);
}

TEST(Holes, WindowSurvivalAreas) {
  const TorusMap f = TorusMap::cat();
  // A full-width strip around W^s(0): survivors after n steps keep u-width
  // lambda^-n of the window.
  const auto a = window_survival_areas(f, fixtures::path_windows(f), 12);
  EXPECT_NEAR(a[0], 0.3 * 0.6, 1e-12);
  for (int n = 1; n <= 12; ++n) EXPECT_LT(a[std::size_t(n)], a[std::size_t(n - 1)]);
  EXPECT_NEAR(std::log(a[12] / a[11]), -log_expansion(f), 1e-3);
  EXPECT_THROW(window_survival_areas(f, {square(0.5, 0.5, 0.1), square(0.55, 0.5, 0.1)}, 3), ConfigError);
}
