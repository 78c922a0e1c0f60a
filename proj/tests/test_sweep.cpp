#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "escape/errors.hpp"
#include "escape/scenarios.hpp"
#include "escape/sweep.hpp"

using namespace escape;

namespace {

std::vector<double> grid(int n, double a = 0, double b = 1) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(a + (b - a) * i / (n - 1));
  return t;
}

}  // namespace

TEST(Staircase, ThreeSteps) {
  const auto t = grid(30);
  std::vector<double> rho;
  for (int i = 0; i < 30; ++i) rho.push_back(i < 10 ? -0.1 : i < 20 ? -0.3 : -0.6);
  const StaircaseReport r = staircase(t, rho, std::vector<double>(30, 0), std::vector<GapFlag>(30, GapFlag::touch));
  EXPECT_EQ(r.plateaus.size(), 3u);
  EXPECT_EQ(r.jumps.size(), 2u);
  EXPECT_EQ(r.monotone_violations, 0);
  EXPECT_TRUE(r.jumps_colocated);
}

TEST(Staircase, LinearHasNoPlateaus) {
  const auto t = grid(50);
  std::vector<double> rho;
  for (double v : t) rho.push_back(-v);  // slope * spacing = 0.02 > tol_plateau
  const StaircaseReport r = staircase(t, rho, std::vector<double>(50, 0), std::vector<GapFlag>(50, GapFlag::gap));
  EXPECT_TRUE(r.plateaus.empty());
  EXPECT_EQ(r.plateau_fraction, 0.0);
}

TEST(Staircase, JumpAwayFromTouchIsFlagged) {
  const auto t = grid(20);
  std::vector<double> rho(20, -0.1);
  for (int i = 10; i < 20; ++i) rho[std::size_t(i)] = -0.5;
  const StaircaseReport r = staircase(t, rho, std::vector<double>(20, 0), std::vector<GapFlag>(20, GapFlag::gap));
  ASSERT_EQ(r.jumps.size(), 1u);
  EXPECT_FALSE(r.jumps_colocated);
}

TEST(Staircase, CountsMonotoneViolations) {
  const auto t = grid(10);
  std::vector<double> rho{-0.1, -0.1, -0.2, -0.15, -0.3, -0.3, -0.3, -0.4, -0.4, -0.4};
  EXPECT_EQ(staircase(t, rho, std::vector<double>(10, 0), std::vector<GapFlag>(10, GapFlag::gap)).monotone_violations, 1);
  // Within 3 sigma the same rise is noise.
  EXPECT_EQ(staircase(t, rho, std::vector<double>(10, 0.02), std::vector<GapFlag>(10, GapFlag::gap)).monotone_violations, 0);
}

TEST(Holder, SquareRootProfile) {
  const auto t = grid(200, 0, 0.1);
  std::vector<double> rho;
  for (double v : t) rho.push_back(-std::sqrt(v));
  const HolderFit f = holder_fit(t, rho, 0, 0.1);
  EXPECT_NEAR(f.alpha, 0.5, 0.05);
  EXPECT_TRUE(f.alpha_positive);
}

TEST(Holder, ConstantIsPlateau) {
  const auto t = grid(50);
  const HolderFit f = holder_fit(t, std::vector<double>(50, -0.3), 0, 1);
  EXPECT_TRUE(f.plateau);
}

TEST(Semicontinuity, StepDown) {
  std::vector<double> rho{-0.1, -0.1, -0.1, -0.1, -0.5, -0.5, -0.5};
  // rho(t0) equals the left value, right limit lies below: lsc fails at t0.
  EXPECT_EQ(semicontinuity(rho, std::vector<double>(7, 0), 3).cls, Continuity::lsc_violating);
  // Value taken from the right: the left limit exceeds it, usc fails.
  EXPECT_EQ(semicontinuity(rho, std::vector<double>(7, 0), 4).cls, Continuity::usc_violating);
}

TEST(Semicontinuity, Continuous) {
  std::vector<double> rho;
  for (int i = 0; i < 20; ++i) rho.push_back(-0.01 * i * 0.01);
  EXPECT_EQ(semicontinuity(rho, std::vector<double>(20, 0), 10).cls, Continuity::continuous);
}

TEST(Sweep, RejectsTooFewSamples) {
  EXPECT_THROW(run(fixtures::devil_family(10), SweepConfig{}), ConfigError);
}

TEST(Sweep, ConstantFamilyConstantRates) {
  const TorusMap f = TorusMap::cat();
  FamilySpec s;
  s.polygons = {translate(eigen_rect(f, -0.3274, 0.3274, -0.5886, 0.5886), {0.3814, 0.6348})};
  s.complement = true;
  s.kind = HoleKind::regular;
  s.mode = FamilyMode::constant;
  s.samples = 50;
  SweepConfig cfg;
  cfg.N = 20000;
  cfg.k = 64;
  cfg.survivor_n = 20;
  const SweepResult r = run(make_family(s, &f), cfg);
  for (const auto& x : r.records) {
    EXPECT_EQ(x.rho_mc, r.records[0].rho_mc);  // common random numbers
    EXPECT_NEAR(x.rho_ulam, r.records[0].rho_ulam, 1e-12);  // warm starts differ
  }
}

TEST(Sweep, BakerCellFamilyIsStepFunction) {
  // Hole [0, c/16) with c = ceil(16 t): a union of depth-4 cells.
  HoleFamily fam;
  fam.spec.t_min = 0.07;
  fam.spec.t_max = 0.43;
  fam.spec.samples = 60;
  fam.monotone_increasing = true;
  auto cells = [](double t) { return int(std::ceil(16 * t - 1e-12)); };
  fam.generator = [cells](double t) {
    const double x = cells(t) / 16.0;
    const Polygon p{{0, 0}, {x, 0}, {x, 1}, {0, 1}};
    return Hole(std::vector<Polygon>{p}, HoleKind::markov);
  };
  SweepConfig cfg;
  cfg.map = BakerMap(2);
  cfg.run_mc = false;
  cfg.k = 16;
  cfg.survivor_n = 10;
  const SweepResult r = run(fam, cfg);
  const StaircaseReport st = staircase(r);
  EXPECT_EQ(st.monotone_violations, 0);
  // [1/4, 5/16) has prefix 0100 and falls into [0, 1/4) within two steps,
  // so c = 4 and c = 5 share the survivor set and the rate log(phi / 2).
  auto cls = [&](std::size_t i) {
    const int c = cells(r.t_samples[i]);
    return c == 5 ? 4 : c;
  };
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    if (cls(i) == 4) EXPECT_NEAR(r.records[i].rho_ulam, std::log(std::numbers::phi / 2), 1e-10) << i;
    if (i == 0) continue;
    if (cls(i) == cls(i - 1)) EXPECT_NEAR(r.records[i].rho_ulam, r.records[i - 1].rho_ulam, 1e-12) << i;
    else EXPECT_LT(r.records[i].rho_ulam, r.records[i - 1].rho_ulam) << i;
  }
  // Five distinct rates. The c = 2 -> 3 step is 0.047, below tol_jump.
  EXPECT_EQ(st.plateaus.size(), 5u);
  EXPECT_EQ(st.jumps.size(), 3u);
  EXPECT_GE(st.plateau_fraction, 0.8);
}

TEST(Sweep, PathFamilyConstantOnContactSide) {
  const TorusMap f = TorusMap::cat();
  for (double t : {-0.02, -0.01, 0.0}) EXPECT_NEAR(window_rate(f, fixtures::path_windows(f, t)), -log_expansion(f), 1e-3);
}
