#pragma once

#include <cstdint>
#include <vector>

#include "escape/dynsys.hpp"
#include "escape/holes.hpp"

namespace escape {

enum class McMode { plain, replenished };

struct SurvivorSeries {
  int n_max = 0;
  std::int64_t N = 0;
  std::uint64_t seed = 0;
  McMode mode = McMode::plain;
  // Plain: survivors of the original cloud after n steps.
  // Replenished: survivors among the N points alive before step n.
  std::vector<std::int64_t> counts;
  std::vector<double> per_step_rate;
  // log of the estimated measure of points avoiding H for steps 0..n.
  std::vector<double> cum_log_measure;
  int extinct_step = -1;  // first step with no survivors, -1 if none
};

struct McOptions {
  // Toral maps: clones are displaced along e_u by up to this much. Without it
  // a clone repeats its parent's future exactly and the population dies
  // within ~log N / |rho| steps; the survivor law is smooth along unstable
  // leaves, so the displacement costs only an O(jitter) bias.
  double clone_jitter = 1e-3;
  std::size_t chunk = 1 << 14;
  // Toral maps: draw the initial cloud uniformly from this convex polygon
  // (any lift) instead of the whole torus. The decay rate does not depend on
  // the initial density as long as it is positive near the survivor set, and
  // a local cloud resolves survivor strips far thinner than 1 / N.
  Polygon initial_region;

};

SurvivorSeries run_series(const Map& f, const Hole& hole, std::int64_t N, int n_max,
                          std::uint64_t seed, McMode mode, const McOptions& opt = {});

struct WindowPolicy {
  int drop = 10;         // transient steps skipped
  int min_count = 100;   // stop the window once survivors fall below this
  int min_steps = 20;
  int sub_window = 10;
  int bootstrap = 200;
  std::uint64_t bootstrap_seed = 0x5eed5eedULL;
};

struct EscapeEstimate {
  double rho_hat = 0.0;
  double rho_lower_hat = 0.0;
  double rho_upper_hat = 0.0;
  double std_err = 0.0;
  int n0 = 0, n1 = 0;
  bool extinct = false;  // replenished population died out: rho = -inf
};

EscapeEstimate estimate(const SurvivorSeries& series, const WindowPolicy& policy = {});

// Least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace escape
