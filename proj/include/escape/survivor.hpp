#pragma once

#include <limits>
#include <string>
#include <vector>

#include "escape/dynsys.hpp"
#include "escape/holes.hpp"
#include "escape/ulam.hpp"

namespace escape {

// Outer approximation of Omega(H) on a k x k grid after n trimming rounds.
struct SurvivorApprox {
  int k = 0;
  int n = 0;
  std::vector<char> retained;     // per cell id = iy * k + ix
  std::vector<int> count_history;  // retained count after round 0..n
  bool stabilized = false;         // last round changed the count by < 1%

  int count() const { return count_history.empty() ? 0 : count_history.back(); }
  double cell_width() const { return 1.0 / k; }
};

struct SurvivorOptions {
  // true: drop a cell only if the closed cell lies in H (sound for every
  // survivor point). false: drop cells whose interior lies in H, the
  // symbolic-coding convention.
  bool closed_cells = true;
  double max_image_length = 4.0;  // longer toral iterates are not tested
  double stable_change = 0.01;
};

// A cell is dropped once some exact iterate f^i(cell), |i| <= n, is
// certified inside H. Between horizons the set is trimmed to cells that
// keep a forward and a backward Ulam neighbour among the retained ones.
SurvivorApprox compute(const Map& f, const UlamOperator& grid, const Hole& h, int n,
                       const SurvivorOptions& opt = {});
SurvivorApprox compute(const Map& f, const Hole& h, int k, int n, const SurvivorOptions& opt = {});
// Rounds until the count changes by < 1% per round, or n = 60.
SurvivorApprox compute_auto(const Map& f, const UlamOperator& grid, const Hole& h,
                            const SurvivorOptions& opt = {});

// Torus distance from the hole boundary to the union of retained cells;
// +inf when nothing is retained.
double boundary_gap(const SurvivorApprox& a, const Hole& h);

enum class GapFlag { gap, touch, undecided };
std::string to_string(GapFlag g);

// GAP: gap >= 2 cell widths and the horizon stabilized. TOUCH: gap < one
// cell width. UNDECIDED otherwise.
GapFlag classify(const SurvivorApprox& a, double gap);

struct FamilyClassification {
  std::vector<double> t;
  std::vector<double> gap;
  std::vector<GapFlag> flag;
  double gap_fraction = 0.0;
};

FamilyClassification classify_family(const Map& f, const HoleFamily& fam, const std::vector<double>& ts,
                                     int k, int n, const SurvivorOptions& opt = {});

}  // namespace escape
