#pragma once

#include <string>
#include <vector>

#include "escape/config.hpp"
#include "escape/mc_escape.hpp"
#include "escape/survivor.hpp"
#include "escape/sweep.hpp"
#include "escape/tower.hpp"
#include "escape/ulam.hpp"

namespace escape {

// Round-trip decimal; inf and nan spelled as "inf", "-inf", "nan".
std::string fmt(double v);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const Json& j);
void ensure_dir(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

// Columns n, survivors, rate, cum_log_measure.
std::string series_csv(const SurvivorSeries& s);
// Columns cell_i, cell_j, mass.
std::string qsd_csv(const UlamOperator& op, const SpectralResult& sr);
// Columns cell_i, cell_j, retained_at_n.
std::string omega_csv(const SurvivorApprox& a);
// Columns pair_id, agreement_depth, r1, r2, abs_diff.
std::string closeness_csv(const ClosenessReport& r);
// Columns t, rho_mc, rho_mc_lo, rho_mc_hi, stderr, rho_ulam, p_upper, p_lower, gap_flag.
std::string sweep_csv(const SweepResult& r);

Json to_json(const SpectralResult& sr);
Json to_json(const StaircaseReport& r);
Json to_json(const HolderFit& f);
Json to_json(const SemicontinuityReport& r);

// Line chart of rho(t) with plateaus shaded; -inf samples drawn on the floor.
std::string staircase_svg(const SweepResult& r, const StaircaseReport& st,
                          SweepResult::Series series = SweepResult::Series::ulam);

}  // namespace escape
