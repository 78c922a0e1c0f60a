#include <gtest/gtest.h>

#include <random>

#include "escape/scenarios.hpp"
#include "escape/survivor.hpp"
#include "escape/symbolic.hpp"

using namespace escape;

namespace {

Hole strip(double x0, double x1) {
  const Polygon p{{x0, 0}, {x1, 0}, {x1, 1}, {x0, 1}};
  return Hole(std::vector<Polygon>{p});
}

}  // namespace

TEST(Survivor, EmptyHoleKeepsEverything) {
  const SurvivorApprox a = compute(TorusMap::cat(), Hole(), 16, 5);
  EXPECT_EQ(a.count(), 256);
  EXPECT_EQ(boundary_gap(a, Hole()), INFINITY);
}

TEST(Survivor, FullHoleKeepsNothing) {
  const Polygon u{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const SurvivorApprox a = compute(TorusMap::cat(), Hole(std::vector<Polygon>{u}), 16, 0);
  EXPECT_EQ(a.count(), 0);
}

TEST(Survivor, BakerHalfStripShrinksToCorner) {
  const BakerMap b(2);
  const int k = 64;
  int prev = k * k + 1;
  // Digit avoidance is a statement about codes, so cells are dropped by
  // interior. Closed cells also keep the boundary orbit x = 1/2 -> 0.
  SurvivorOptions opt;
  opt.closed_cells = false;
  for (int n : {2, 4, 8}) {
    const SurvivorApprox a = compute(b, strip(0, 0.5), k, n, opt);
    EXPECT_LE(a.count(), prev);
    prev = a.count();
    // Omega = {(1, 1)}: every retained cell lies within a cell width plus
    // 2^-n of the corner, on the torus.
    for (int c = 0; c < k * k; ++c) {
      if (!a.retained[std::size_t(c)]) continue;
      const Point2 centre{(c % k + 0.5) / k, (c / k + 0.5) / k};
      EXPECT_LE(torus_distance(centre, {0, 0}), std::sqrt(2.0) * (1.0 / k + std::ldexp(1.0, -n))) << c;
    }
  }
  EXPECT_EQ(prev, 1);  // the corner cell alone
}

TEST(Survivor, BakerMarkovHoleHasGap) {
  const MarkovPartition p = MarkovPartition::baker(BakerMap(2), 2);
  const Hole h = markov_hole({1, 2}, p);  // [1/4, 3/4): survivors x in {0, 1}
  const SurvivorApprox a = compute(BakerMap(2), h, 32, 20);
  const double gap = boundary_gap(a, h);
  EXPECT_GE(gap, a.cell_width());
  EXPECT_EQ(classify(a, gap), GapFlag::gap);
}

TEST(Survivor, StableSegmentOnBoundaryTouches) {
  const TorusMap f = TorusMap::cat();
  const Hole h = fixtures::path_hole(f);
  for (int k : {64, 128}) {
    const SurvivorApprox a = compute(f, h, k, 30);
    EXPECT_EQ(classify(a, boundary_gap(a, h)), GapFlag::touch) << k;
    EXPECT_TRUE(a.retained[0]);
  }
}

TEST(Survivor, GapGrowsWithHorizon) {
  // The retained set is nested in n, so its distance to the boundary cannot shrink.
  const Hole h = fixtures::devil_family(50).at(0.0);
  double prev = 0;
  for (int n : {2, 5, 10, 20}) {
    const SurvivorApprox a = compute(TorusMap::cat(), h, 128, n);
    const double g = boundary_gap(a, h);
    EXPECT_GE(g, prev);
    prev = g;
  }
}

TEST(Survivor, MarkovHoleContainsSymbolicSurvivors) {
  // Every periodic orbit avoiding the Markov hole stays in retained cells.
  const TorusMap f = TorusMap::cat();
  const MarkovPartition p = MarkovPartition::toral(f, 2);
  const Hole h = markov_hole({0}, p);
  const int k = 64;
  const SurvivorApprox a = compute(f, h, k, 20);
  for (int per = 1; per <= 4; ++per)
    for (const Point2& q : periodic_points(f, per)) {
      bool survives = true;
      Point2 r = q;
      for (int i = 0; i < per; ++i, r = apply(f, r)) survives = survives && !h.contains(r);
      if (!survives) continue;
      const int ix = std::min(k - 1, int(q.x * k)), iy = std::min(k - 1, int(q.y * k));
      EXPECT_TRUE(a.retained[std::size_t(iy * k + ix)]) << q.x << "," << q.y;
    }
}

TEST(Survivor, GapStableUnderSmallPerturbations) {
  // A perturbation that only enlarges the hole keeps Omega(H') inside
  // Omega(H), so the gap drops by at most the Hausdorff distance. The grid
  // approximation is monotone in the hole, so the same holds at (k, n).
  const TorusMap f = TorusMap::cat();
  const Polygon w = translate(eigen_rect(f, -0.3274, 0.3274, -0.5886, 0.5886), {0.3814, 0.6348});
  const int k = 128, n = 40;
  const Hole h = Hole::complement_of({w}, HoleKind::regular, &f);
  const SurvivorApprox a = compute(f, h, k, n);
  const double gap = boundary_gap(a, h);
  ASSERT_EQ(classify(a, gap), GapFlag::gap);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI), rad(0, 0.1 * gap);
  for (int i = 0; i < 20; ++i) {
    const double th = ang(rng), r = rad(rng);
    // Shrinking every edge by r absorbs a shift of length r: the window stays inside w.
    const Polygon wi = translate(offset_convex(w, -r), {r * std::cos(th), r * std::sin(th)});
    const Hole g = Hole::complement_of({wi}, HoleKind::regular, &f);
    ASSERT_LT(hausdorff_boundary_distance(h, g), gap / 4);
    ASSERT_GE(g.area(), h.area());
    const SurvivorApprox b = compute(f, g, k, n);
    const double bg = boundary_gap(b, g);
    EXPECT_GE(bg, gap - hausdorff_boundary_distance(h, g) - 1e-12) << i;
    EXPECT_EQ(classify(b, bg), GapFlag::gap) << i;
  }
}

TEST(Survivor, GapCanCloseUnderASmallShift) {
  // Counterexample to stability under arbitrary Hausdorff-small moves: the
  // period-two orbit {(0.2, 0.4), (0.8, 0.6)} meets the hole, 0.0104 from
  // its boundary. A shift of 0.0121 < gap / 4 brings it into the window.
  const TorusMap f = TorusMap::cat();
  const Polygon w = translate(eigen_rect(f, -0.3274, 0.3274, -0.5886, 0.5886), {0.3814, 0.6348});
  const int k = 128, n = 40;
  const Hole h = Hole::complement_of({w}, HoleKind::regular, &f);
  const double gap = boundary_gap(compute(f, h, k, n), h);
  const double r = 0.0121, th = 0.98;
  const Hole g = Hole::complement_of({translate(w, {r * std::cos(th), r * std::sin(th)})}, HoleKind::regular, &f);
  ASSERT_LT(hausdorff_boundary_distance(h, g), gap / 4);
  bool escaped = false;
  double closest = INFINITY;
  for (Point2 q : {Point2{0.2, 0.4}, Point2{0.8, 0.6}}) {
    escaped = escaped || h.contains(q);
    EXPECT_FALSE(g.contains(q));
    closest = std::min(closest, g.boundary_distance(q));
  }
  EXPECT_TRUE(escaped);
  EXPECT_LT(closest, 1.0 / k);
  const SurvivorApprox b = compute(f, g, k, n);
  EXPECT_NE(classify(b, boundary_gap(b, g)), GapFlag::gap);
}

TEST(Survivor, FamilyClassification) {
  const TorusMap f = TorusMap::cat();
  const HoleFamily jump = fixtures::jump_family(f, 41);
  const FamilyClassification c = classify_family(f, jump, {0.0}, 128, 30);
  EXPECT_EQ(c.flag[0], GapFlag::touch);

  FamilySpec s;
  s.polygons = {translate(eigen_rect(f, -0.3274, 0.3274, -0.5886, 0.5886), {0.3814, 0.6348})};
  s.complement = true;
  s.kind = HoleKind::regular;
  s.mode = FamilyMode::constant;
  s.samples = 5;
  const HoleFamily cst = make_family(s, &f);
  const FamilyClassification g = classify_family(f, cst, cst.grid(), 128, 40);
  EXPECT_DOUBLE_EQ(g.gap_fraction, 1.0);
}
