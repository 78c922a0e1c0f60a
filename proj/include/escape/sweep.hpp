#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "escape/dynsys.hpp"
#include "escape/holes.hpp"
#include "escape/mc_escape.hpp"
#include "escape/survivor.hpp"
#include "escape/ulam.hpp"

namespace escape {

struct SweepConfig {
  Map map = TorusMap::cat();
  bool run_mc = true;
  std::int64_t N = 100'000;
  int n_max = 60;
  std::uint64_t seed = 1;  // shared by every t (common random numbers)
  McMode mode = McMode::replenished;
  WindowPolicy window;

  bool run_ulam = true;
  int k = 256;
  CellRule rule = CellRule::interior;
  bool warm_start = true;

  bool run_survivor = true;
  int survivor_k = 0;  // 0: same grid as the Ulam operator
  int survivor_n = 60;  // stops early once saturated
  SurvivorOptions survivor;

  int depth = 0;  // Markov partition depth for p_upper / p_lower, 0 = off
  int min_samples = 50;
};

struct SweepRecord {
  double t = 0;
  double rho_mc = kNaN(), rho_mc_lo = kNaN(), rho_mc_hi = kNaN(), stderr_mc = kNaN();
  double rho_ulam = kNaN();
  bool ulam_converged = false;
  double ulam_residual = kNaN();
  double p_upper = kNaN(), p_lower = kNaN();  // p_lower: entropy of the inner subshift
  bool aligned = false;
  double gap = kNaN();
  GapFlag gap_flag = GapFlag::undecided;
  int survivor_count = 0;
  std::string error;  // failures of individual estimators, sweep continues

  static constexpr double kNaN() { return std::numeric_limits<double>::quiet_NaN(); }
};

struct SweepResult {
  std::vector<double> t_samples;
  std::vector<SweepRecord> records;
  bool monotone = false;
  bool regular = false;

  enum class Series { ulam, mc };
  std::vector<double> values(Series s) const;
  std::vector<double> stderrs(Series s) const;  // zeros for Ulam
  std::vector<GapFlag> flags() const;
};

// Evaluates every estimator at every family sample, in order. Throws
// ConfigError for fewer than cfg.min_samples samples.
SweepResult run(const HoleFamily& family, const SweepConfig& cfg);
SweepResult run(const HoleFamily& family, const std::vector<double>& ts, const SweepConfig& cfg);

struct Plateau {
  int i0 = 0, i1 = 0;  // inclusive sample indices
  double t0 = 0, t1 = 0;
  double value = 0;  // mean over the plateau
};

struct Jump {
  int index = 0;  // jump between samples index-1 and index
  double t_left = 0, t_right = 0;
  double left = 0, right = 0;
  bool colocated = false;  // a TOUCH sample lies within one spacing
};

struct StaircaseReport {
  std::vector<Plateau> plateaus;
  std::vector<Jump> jumps;
  int monotone_violations = 0;
  double plateau_fraction = 0;
  bool jumps_colocated = true;
};

struct StaircaseOptions {
  double tol_plateau = 1e-3;
  double tol_jump = 5e-2;
  double tol_monotone = 1e-10;  // absolute slack for exact series
  double sigma_monotone = 3.0;  // slack in combined stderrs for noisy series
};

// Plateaus are maximal runs of >= 2 samples with total variation below
// tol_plateau; jumps are steps above tol_jump.
StaircaseReport staircase(const std::vector<double>& t, const std::vector<double>& rho,
                          const std::vector<double>& stderr_, const std::vector<GapFlag>& flags,
                          const StaircaseOptions& opt = {});
StaircaseReport staircase(const SweepResult& sr, SweepResult::Series s = SweepResult::Series::ulam,
                          const StaircaseOptions& opt = {});

struct HolderFit {
  double C = 0, alpha = 0;
  double alpha_stderr = 0;
  double residual_rms = 0;
  int lags = 0;
  bool plateau = false;        // rho constant on the range: alpha unconstrained
  bool alpha_positive = false;  // alpha - 2 stderr > 0
};

// Regression of log w(h) on log h, where w(h) is the largest change of rho
// over sample pairs at lag h inside [t_lo, t_hi].
HolderFit holder_fit(const std::vector<double>& t, const std::vector<double>& rho, double t_lo, double t_hi);

enum class Continuity { continuous, lsc_violating, usc_violating, both_violating, undecided };
std::string to_string(Continuity c);

struct SemicontinuityReport {
  int index = 0;
  double value = 0, left = 0, right = 0;
  double noise = 0;
  Continuity cls = Continuity::undecided;
  // Upper bracket lower semicontinuous with separated brackets contradicts
  // existence of the limit; false flags such a contradiction.
  bool implication_consistent = true;
};

// One-sided limits from the nearest samples on each side of index i.
SemicontinuityReport semicontinuity(const std::vector<double>& rho, const std::vector<double>& stderr_, int i,
                                    double tol = 1e-3);
SemicontinuityReport semicontinuity(const SweepResult& sr, int i, SweepResult::Series s, double tol = 1e-3);

}  // namespace escape
