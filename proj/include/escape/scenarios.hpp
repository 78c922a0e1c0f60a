#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "escape/config.hpp"
#include "escape/dynsys.hpp"
#include "escape/holes.hpp"
#include "escape/mc_escape.hpp"
#include "escape/sweep.hpp"

namespace escape {

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ScenarioOptions {
  std::string out_dir;  // artifacts go to <out_dir>/<scenario>; empty: no files
  std::optional<int> samples, k, depth;
  std::optional<std::int64_t> N;
  std::uint64_t seed = 1;
};

struct ScenarioOutcome {
  std::string name;
  std::vector<Assertion> assertions;
  std::vector<std::string> artifacts;
  Json metrics = Json::object();
  double seconds = 0;

  bool passed() const;
  int exit_code() const { return passed() ? 0 : 1; }
  Json summary() const;
};

const std::vector<std::string>& scenario_names();
std::string scenario_description(const std::string& name);

// Runs the named scenario and evaluates its declared assertions. Throws
// ConfigError for an unknown name or invalid overrides.
ScenarioOutcome run_scenario(const std::string& name, const ScenarioOptions& opt = {});

// Fixture constructions shared with the acceptance suite.
namespace fixtures {

// Eigen-aligned window [u0, u1] x [-h, h] at the origin of f.
Polygon origin_window(const TorusMap& f, double u0, double u1, double h);

// Complement of a window whose left edge lies on the local stable segment
// of the fixed point 0: W^s_loc(0) is part of the hole boundary.
Hole path_hole(const TorusMap& f, double u0 = 0.0);
std::vector<Polygon> path_windows(const TorusMap& f, double u0 = 0.0);

// Fixed-point window plus windows at the period-two orbit {(0.4, 0.8), (0.6, 0.2)}
// keeping opposite unstable halves at the two orbit points.
std::vector<Polygon> period_two_windows(const TorusMap& f, bool with_fixed_point, bool opposite_halves = true);

// Family sliding the stable edge of the path window across W^s(0) at t = 0.
HoleFamily jump_family(const TorusMap& f, int samples, double half_range = 0.02);

// Nested staircase family: complement of an off-centre eigen window whose
// survivor set keeps a wide gap to the boundary at t = 0. The window's torus
// translates overlap; near t = 0.093 the shrinking union splits and a new
// boundary strip appears, so the Lipschitz certificate stops there.
HoleFamily devil_family(int samples, double t_max = 0.09);

// Baker k = 2 with hole [0, 1/4) x [0, 1).
Hole baker_strip_hole();
double baker_strip_oracle();  // log(phi / 2)

// Exact survivor measure of the baker strip hole: all 2^bits dyadic
// points iterated with exact arithmetic, n = 0..n_max.
std::vector<double> baker_strip_cylinder_measures(int n_max, int bits = 22);

}  // namespace fixtures

// Escape rate from exact window-survival areas: slope of log area over
// n in [n0, n1]; -inf when the area vanishes.
double window_rate(const TorusMap& f, const std::vector<Polygon>& windows, int n0 = 10, int n1 = 25);

// Plain MC with a short fit window, for holes whose survivor set is a finite
// set of saddle orbits. Replenishment cannot resolve the shrinking strip
// around their stable manifolds and dies out. A nonempty region localizes
// the initial cloud (see McOptions::initial_region).
EscapeEstimate thin_set_mc(const Map& f, const Hole& h, std::int64_t N, std::uint64_t seed, int n_max = 20,
                           const Polygon& region = {});

}  // namespace escape
