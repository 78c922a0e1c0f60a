#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "escape/errors.hpp"
#include "escape/holes.hpp"
#include "escape/scenarios.hpp"
#include "escape/symbolic.hpp"

using namespace escape;

namespace {

const double kLog2 = std::log(2.0);

SubshiftModel baker_model(int depth) { return SubshiftModel::from_partition(MarkovPartition::baker(BakerMap(2), depth)); }

std::vector<std::vector<int>> dense(const SubshiftModel& m) {
  std::vector<std::vector<int>> A(std::size_t(m.size()), std::vector<int>(std::size_t(m.size()), 0));
  for (int i = 0; i < m.size(); ++i)
    for (int j : m.succ[std::size_t(i)]) A[std::size_t(i)][std::size_t(j)] = 1;
  return A;
}

}  // namespace

TEST(Symbolic, BakerDepthTwoAdjacency) {
  const MarkovPartition p = MarkovPartition::baker(BakerMap(2), 2);
  ASSERT_EQ(p.size(), 4);
  for (int j = 0; j < 4; ++j) {
    auto s = p.successors()[std::size_t(j)];
    std::sort(s.begin(), s.end());
    EXPECT_EQ(s, (std::vector<int>{(2 * j) % 4, (2 * j + 1) % 4}));
  }
  const MarkovPartition r = refine(p, 1);
  ASSERT_EQ(r.size(), 8);
  for (const auto& s : r.successors()) EXPECT_EQ(s.size(), 2u);
}

TEST(Symbolic, FullShiftRadius) {
  for (int d = 1; d <= 5; ++d) EXPECT_NEAR(spectral_radius(dense(baker_model(d))), 2.0, 1e-12);
  EXPECT_NEAR(spectral_radius({{1, 1}, {1, 1}}), 2.0, 1e-12);
  EXPECT_EQ(spectral_radius({{0, 1}, {0, 0}}), 0.0);
}

TEST(Symbolic, RestrictQuarterStrip) {
  const SubshiftModel m = restrict(baker_model(2), {0});
  ASSERT_EQ(m.size(), 3);
  EXPECT_EQ(dense(m), (std::vector<std::vector<int>>{{0, 1, 1}, {1, 0, 0}, {0, 1, 1}}));
  EXPECT_EQ(m.state_to_cell, (std::vector<int>{1, 2, 3}));
  EXPECT_NEAR(spectral_radius(dense(m)), std::numbers::phi, 1e-12);
  EXPECT_NEAR(spectral_radius(m), std::numbers::phi / 2, 1e-12);  // weighted by 1/2 per symbol
  EXPECT_NEAR(pressure(m), std::log(std::numbers::phi) - kLog2, 1e-12);
  EXPECT_EQ(restrict(baker_model(2), {}).size(), 4);
  EXPECT_THROW(restrict(baker_model(2), {0, 1, 2, 3}), ConfigError);
}

TEST(Symbolic, PressureExamples) {
  EXPECT_NEAR(pressure(baker_model(3)), 0.0, 1e-12);
  EXPECT_NEAR(pressure(SubshiftModel::from_dense({{1}}, -kLog2)), -kLog2, 1e-15);
  EXPECT_EQ(pressure(SubshiftModel::from_dense({{0, 1}, {0, 0}})), -INFINITY);
}

TEST(Symbolic, MaxMeanCycle) {
  const SubshiftModel m = restrict(baker_model(2), {0});
  const CycleResult c = max_mean_cycle_pressure(m);
  EXPECT_NEAR(c.value, -kLog2, 1e-12);
  EXPECT_FALSE(c.cycle.empty());
  const CycleResult d = max_mean_cycle_pressure(m, {2});
  EXPECT_NEAR(d.value, -kLog2, 1e-12);
  std::vector<int> cyc = d.cycle;
  std::sort(cyc.begin(), cyc.end());
  EXPECT_EQ(cyc, (std::vector<int>{0, 1}));
  EXPECT_EQ(max_mean_cycle_pressure(SubshiftModel::from_dense({{0, 1}, {0, 0}})).value, -INFINITY);
}

TEST(Symbolic, MaxMeanCycleWithVaryingWeights) {
  SubshiftModel m = SubshiftModel::from_dense({{1, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  m.log_w = {-3.0, -1.0, -0.5};
  // Cycles: {0} mean -3, {0 1 2} mean -1.5.
  EXPECT_NEAR(max_mean_cycle_pressure(m).value, -1.5, 1e-12);
}

TEST(Symbolic, BoundaryTouchingStates) {
  const MarkovPartition p = MarkovPartition::baker(BakerMap(2), 3);
  const Hole h = markov_hole({3}, p);  // [3/8, 1/2)
  EXPECT_EQ(boundary_touching_states(p, Hole(std::vector<Polygon>{{{0.4, 0.4}, {0.45, 0.4}, {0.45, 0.45}, {0.4, 0.45}}}), 1e-3).size(), 1u);
  auto touch = boundary_touching_states(p, h, 1e-12);
  std::sort(touch.begin(), touch.end());
  EXPECT_EQ(touch, (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(boundary_touching_states(p, h, 1.0).size(), 8u);
}

TEST(Symbolic, CylinderDecayMatchesPressure) {
  const auto m = fixtures::baker_strip_cylinder_measures(20);
  EXPECT_NEAR(std::log(m[20] / m[19]), pressure(restrict(baker_model(2), {0})), 1e-6);
  EXPECT_DOUBLE_EQ(m[0], 0.75);
}

TEST(Symbolic, RefinementStability) {
  const BakerMap b(2);
  const Hole h = fixtures::baker_strip_hole();
  const MarkovPartition p2 = MarkovPartition::baker(b, 2);
  const double base = pressure_report(p2, h).p_upper;
  for (int extra : {1, 3, 5}) EXPECT_NEAR(pressure_report(refine(p2, extra), h).p_upper, base, 1e-10);
}

TEST(Symbolic, AddingHoleStatesNeverRaisesPressure) {
  const SubshiftModel m = baker_model(4);
  std::vector<int> removed;
  double prev = pressure(m);
  for (int s : {5, 11, 2, 14, 7}) {
    removed.push_back(s);
    const double p = pressure(restrict(m, removed));
    EXPECT_LE(p, prev + 1e-12);
    prev = p;
  }
}

TEST(Symbolic, SandwichOnFixtures) {
  const BakerMap b(2);
  const MarkovPartition p = MarkovPartition::baker(b, 4);
  for (const std::vector<int>& cells : {std::vector<int>{0}, {3, 4}, {9}, {6, 7, 8}}) {
    const PressureReport r = pressure_report(p, markov_hole(cells, p));
    EXPECT_TRUE(r.aligned);
    EXPECT_LE(r.p_lower, r.p_upper + 1e-10);
    EXPECT_LE(r.p_lower_entropy, r.p_upper + 1e-10);
  }
}

TEST(Symbolic, ToralPartitionCertified) {
  const TorusMap f = TorusMap::cat();
  for (int d : {1, 2, 4}) {
    const MarkovPartition p = MarkovPartition::toral(f, d);
    EXPECT_TRUE(p.markov_certified()) << d;
    double total = 0;
    for (int i = 0; i < p.size(); ++i) total += area(p.cell(i));
    EXPECT_NEAR(total, 1.0, 1e-10);
    EXPECT_NEAR(pressure(SubshiftModel::from_partition(p)), 0.0, 1e-10);
  }
}

TEST(Symbolic, ToralMarkovHoleRefines) {
  const TorusMap f = TorusMap::cat();
  const MarkovPartition p2 = MarkovPartition::toral(f, 2);
  const Hole h = markov_hole({0}, p2);
  const PressureReport a = pressure_report(p2, h);
  const PressureReport c = pressure_report(MarkovPartition::toral(f, 4), h);
  EXPECT_TRUE(a.aligned);
  EXPECT_TRUE(c.aligned);
  EXPECT_NEAR(a.p_upper, c.p_upper, 1e-10);
  EXPECT_LT(a.p_upper, 0.0);
}

TEST(Symbolic, StronglyConnectedComponents) {
  const std::vector<std::vector<int>> succ{{1}, {0}, {3}, {2, 0}, {}};
  const auto scc = strongly_connected(succ, std::vector<char>(5, 1));
  EXPECT_EQ(scc.size(), 3u);
}
