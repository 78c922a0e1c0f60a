#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace escape {

struct TowerBranch {
  double w = 0.0;  // base measure of the branch
  int R = 1;       // return time
};

// Expanding tower over a full-branch base: cells (level, branch) with
// level < R_j, truncated at level L.
struct TowerSpec {
  std::vector<TowerBranch> branches;
  double C = 1.0, theta = 0.5;  // tail bound sum_{R_j > n} w_j <= C theta^n
  int L = 32;

  // Throws ConfigError when widths, return times or the tail bound fail.
  void validate() const;
  bool mixing() const;  // gcd of the return times is 1
  double truncation_bound() const;  // C theta^L / (1 - theta)
};

// Geometric tower: w_j = 2^-j for R_j = j, j < J, the last branch takes the
// remaining mass. Tail constant C = 1, theta = 1/2.
TowerSpec geometric_tower(int J, int L);

enum class TailClosure { absorb, reflect };

using TowerCell = std::pair<int, int>;  // (level, branch)

struct TowerHole {
  std::vector<TowerCell> cells;
  int opening_level() const;  // +inf sentinel (INT_MAX) when empty
};

struct TowerEdge {
  int from, to;
  double w;
};

class TowerOperator {
 public:
  static TowerOperator build(const TowerSpec& spec, TailClosure closure = TailClosure::absorb);

  const TowerSpec& spec() const { return spec_; }
  TailClosure closure() const { return closure_; }
  int size() const { return int(cells_.size()); }
  int index(int level, int branch) const;  // -1 if outside the truncation
  const std::vector<TowerCell>& cells() const { return cells_; }
  const std::vector<TowerEdge>& edges() const { return edges_; }
  const std::vector<char>& masked() const { return masked_; }
  bool mixing() const { return mixing_; }
  int opening_level() const { return opening_level_; }

  // Applies the hole: masked cells lose all in- and out-edges.
  TowerOperator open(const TowerHole& h) const;

 private:
  TowerSpec spec_;
  TailClosure closure_ = TailClosure::absorb;
  std::vector<TowerCell> cells_;
  std::vector<int> offset_;  // first cell id of each branch
  std::vector<TowerEdge> edges_;
  std::vector<char> masked_;
  bool mixing_ = true;
  int opening_level_ = std::numeric_limits<int>::max();
};

struct TowerSpectrum {
  double r = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Leading eigenvalue of the (masked) operator by shifted power iteration.
TowerSpectrum leading(const TowerOperator& op, int max_iter = 2'000'000);

// Root z in (0, 1] of sum over surviving branches of w_j z^-R_j = 1, where
// a branch survives when none of its cells is in the hole. Absorb drops
// branches taller than L, reflect caps their return time at L.
double renewal_root(const TowerSpec& spec, const TowerHole& h, TailClosure closure = TailClosure::absorb);

// Measure of base points whose first n tower steps avoid H, by explicit
// enumeration of return itineraries. Throws CapExceeded past max_paths.
double survival_measure(const TowerSpec& spec, const TowerHole& h, int n, long long max_paths = 50'000'000);

// Earliest tower time at which an orbit from the base can land in H1 xor H2,
// avoiding the common part; INT_MAX when never.
int agreement_depth(const TowerSpec& spec, const TowerHole& h1, const TowerHole& h2);

struct ClosenessRow {
  int pair_id = 0;
  int depth = 0;
  double r1 = 0, r2 = 0, abs_diff = 0;
  std::string error;  // nonempty when a solve failed
};

struct ClosenessReport {
  std::vector<ClosenessRow> rows;
  double slope = 0, intercept = 0, r2 = 0;  // log|r1 - r2| = a + b n
  int fitted = 0;
};

ClosenessReport eigenvalue_closeness_experiment(const TowerSpec& spec,
                                                const std::vector<std::pair<TowerHole, TowerHole>>& pairs);

// Pair with agreement depth n on spec: both holes remove `common`; the second
// also removes every cell at level n.
std::pair<TowerHole, TowerHole> depth_pair(const TowerSpec& spec, const TowerHole& common, int n);

}  // namespace escape
