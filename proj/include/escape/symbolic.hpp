#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "escape/dynsys.hpp"
#include "escape/geometry.hpp"

namespace escape {

class Hole;

// Rectangle in eigen-coordinates: center + [u0,u1] e_u + [s0,s1] e_s.
struct EigenRect {
  Vec2 center;
  double u0, u1, s0, s1;
};

// Transition of base rectangles: f(R_from) crosses R_to + shift.
struct BaseTransition {
  int from, to;
  Vec2 shift;
  double du, ds;  // eigen-coordinates of (c_to + shift - f(c_from))
};

// Finite Markov partition with 0/1 adjacency. Baker: k^d dyadic x-strips.
// Toral: rectangles cut by the symmetric stable/unstable segments through
// the fixed point, refined to the two-sided window of depth d.
class MarkovPartition {
 public:
  static MarkovPartition baker(const BakerMap& f, int depth);
  static MarkovPartition toral(const TorusMap& f, int depth, std::size_t max_cells = 1'000'000);

  int size() const { return int(cells_.size()); }
  int depth() const { return depth_; }
  const Polygon& cell(int id) const;
  const std::vector<std::vector<int>>& successors() const { return succ_; }
  double log_weight() const { return log_weight_; }  // -log|lambda_u|, every state
  bool is_toral() const { return toral_.has_value(); }
  const std::optional<TorusMap>& torus() const { return toral_; }
  const std::optional<BakerMap>& baker_map() const { return baker_; }

  // Base data of a toral partition (segment half-lengths, rectangles).
  double seg_u() const { return seg_u_; }
  double seg_s() const { return seg_s_; }
  const std::vector<EigenRect>& base_rects() const { return base_; }
  const std::vector<BaseTransition>& base_transitions() const { return trans_; }

  // Exact check that every transition crosses its target fully in the
  // unstable direction and sits inside it in the stable direction.
  bool markov_certified() const { return certified_; }

 private:
  int depth_ = 0;
  std::vector<Polygon> cells_;
  std::vector<std::vector<int>> succ_;
  double log_weight_ = 0.0;
  std::optional<TorusMap> toral_;
  std::optional<BakerMap> baker_;
  double seg_u_ = 0, seg_s_ = 0;
  std::vector<EigenRect> base_;
  std::vector<BaseTransition> trans_;
  bool certified_ = false;
};

// Rebuild at depth + extra_depth; the old cells are unions of the new ones.
MarkovPartition refine(const MarkovPartition& p, int extra_depth);

struct SubshiftModel {
  std::vector<std::vector<int>> succ;  // A[i][j] = 1 iff j in succ[i]
  std::vector<double> log_w;           // per-state log weight
  std::vector<int> state_to_cell;

  int size() const { return int(succ.size()); }
  static SubshiftModel from_partition(const MarkovPartition& p);
  static SubshiftModel from_dense(const std::vector<std::vector<int>>& A, double log_w = 0.0);
};

SubshiftModel restrict(const SubshiftModel& m, const std::vector<int>& hole_states);

// Strongly connected components of the active vertices (iterative Tarjan),
// in reverse topological order.
std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& succ,
                                                 const std::vector<char>& active);

// Perron root of diag(exp(log_w)) A: max over strongly connected components.
double spectral_radius(const SubshiftModel& m);
double spectral_radius(const std::vector<std::vector<int>>& A);

// log sp(diag(w) A); -inf when the matrix is nilpotent.
double pressure(const SubshiftModel& m);

struct CycleResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<int> cycle;  // state ids of m, witness loop (empty if acyclic)
};

// Maximum mean cycle with edge weight log_w[from], over states not excluded.
CycleResult max_mean_cycle_pressure(const SubshiftModel& m, const std::vector<int>& excluded = {});

// States whose cells meet the closed eps-neighbourhood of the hole boundary.
std::vector<int> boundary_touching_states(const MarkovPartition& p, const Hole& h, double eps);

// Cells whose interior lies in H (interior rule).
std::vector<int> hole_states(const MarkovPartition& p, const Hole& h);
// Cells meeting H in positive area.
std::vector<int> touched_states(const MarkovPartition& p, const Hole& h);

struct PressureReport {
  double p_upper = 0;          // log sp over states not inside H
  double p_lower = 0;          // best periodic orbit avoiding H and N_eps(dH)
  double p_lower_entropy = 0;  // log sp over states avoiding H and N_eps(dH)
  double sp_restricted = 0;
  std::vector<int> cycle_witness;  // partition cell ids
  bool aligned = false;            // H is exactly a union of cells
  double rho_reference = std::numeric_limits<double>::quiet_NaN();  // p_upper when aligned
  int states = 0, survivor_states = 0, inner_states = 0;
};

PressureReport pressure_report(const MarkovPartition& p, const Hole& h, double eps = 1e-9);

}  // namespace escape
