#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "escape/dynsys.hpp"
#include "escape/geometry.hpp"

namespace escape {

enum class HoleKind { generic, regular, markov };
enum class EdgeTag { none, stable, unstable };

struct BoundaryEdge {
  Segment seg;
  EdgeTag tag = EdgeTag::none;
};

// Open subset of the torus: the interior of a finite union of convex
// polygons with pairwise disjoint interiors. Edges shared by two pieces
// (seams of a decomposition) are not part of the boundary.
class Hole {
 public:
  Hole() = default;
  Hole(std::vector<Polygon> components, HoleKind kind = HoleKind::generic,
       const TorusMap* map = nullptr);

  // Torus minus the closed union of the given convex windows.
  static Hole complement_of(const std::vector<Polygon>& windows,
                            HoleKind kind = HoleKind::generic, const TorusMap* map = nullptr);

  bool empty() const { return comps_.empty(); }
  HoleKind kind() const { return kind_; }
  const std::vector<Polygon>& components() const { return comps_; }
  const std::vector<BoundaryEdge>& boundary() const { return boundary_; }
  double area() const { return area_; }

  bool contains(Point2 p) const;
  // Area of poly ∩ H for a convex polygon given in the plane (any lift).
  double inside_area(const Polygon& poly) const;
  // True when the closed polygon lies inside the open hole.
  bool covers_closed(const Polygon& poly) const;
  // Cheap classification of an axis box inside [0,1]^2 from the index:
  // 1 when the closed box lies in H, 0 when H misses it, -1 when unknown.
  int quick_box_state(const Box& b) const;
  // True when the closed convex polygon (any lift) meets the boundary.
  bool boundary_meets(const Polygon& poly) const;
  // Torus distance from a convex polygon (any lift) to the boundary.
  double boundary_distance(const Polygon& poly) const;
  double boundary_distance(Point2 p) const;

 private:
  void build_index();
  void build_boundary(const TorusMap* map);

  std::vector<Polygon> comps_;
  std::vector<Box> boxes_;
  HoleKind kind_ = HoleKind::generic;
  std::vector<BoundaryEdge> boundary_;
  double area_ = 0.0;

  // Acceleration grid over [0,1)^2: per cell either "all inside" or a list
  // of (component, shift) candidates.
  struct Candidate {
    int comp;
    Vec2 shift;
  };
  static constexpr int kGrid = 64;
  std::vector<std::vector<Candidate>> cand_;
  std::vector<char> full_;
};

double hausdorff_boundary_distance(const Hole& h1, const Hole& h2);
double symmetric_difference_area(const Hole& h1, const Hole& h2);
// Area of H1 ∩ H2.
double overlap_area(const Hole& h1, const Hole& h2);

enum class Side { left, right };

// Eigen-parallelogram at the fixed point 0. Left: u in (-width - offset, -offset);
// right: u in (offset, offset + width); s in (-height, height). offset = 0
// puts the local stable segment through 0 on the boundary, offset < 0 covers 0.
Hole regular_hole_through_fixed_point(const TorusMap& f, Side side, double width, double height,
                                      double offset);

// Parallelogram {u in [u0,u1], s in [s0,s1]} around the origin, ccw.
Polygon eigen_rect(const TorusMap& f, double u0, double u1, double s0, double s1);

class MarkovPartition;
Hole markov_hole(const std::vector<int>& cells, const MarkovPartition& partition);

// Convex polygon with every edge pushed outward by d (inward for d < 0).
Polygon offset_convex(const Polygon& p, double d);
// Move edge `edge` (from vertex edge to edge+1) outward by d.
Polygon slide_edge(const Polygon& p, int edge, double d);
// Smallest interior angle of a convex polygon.
double min_interior_angle(const Polygon& p);

enum class FamilyMode { constant, nested, translate, slide };

struct FamilySpec {
  std::vector<Polygon> polygons;
  bool complement = false;  // hole = torus minus windows
  FamilyMode mode = FamilyMode::nested;
  double t_min = 0.0, t_max = 0.2;
  int samples = 201;
  Vec2 direction{1, 0};  // translate
  int polygon = 0;       // slide
  int edge = 0;          // slide
  HoleKind kind = HoleKind::generic;
  std::vector<Polygon> fixed_windows;  // complement only, untouched by t
};

// t -> H_t. With lipschitz_cert, boundary moves at most |t - t'|. For
// complement families this assumes the windows' torus translates keep one
// overlap pattern over [t_min, t_max]; a split or merge breaks it.
struct HoleFamily {
  FamilySpec spec;
  bool lipschitz_cert = false;
  bool monotone_increasing = false;
  std::function<Hole(double)> generator;

  Hole at(double t) const { return generator(t); }
  std::vector<double> grid() const;
};

HoleFamily make_family(const FamilySpec& spec, const TorusMap* map = nullptr);

// Exact areas of T_n = {x : f^i x in the closed windows, 0 <= i <= n} for
// n = 0..n_max, by clipping pulled-back pieces against the windows. The hole
// is the torus minus the windows, which must not overlap on the torus.
// Throws CapExceeded once the piece count passes max_pieces.
std::vector<double> window_survival_areas(const TorusMap& f, const std::vector<Polygon>& windows, int n_max,
                                          std::size_t max_pieces = 2'000'000);

}  // namespace escape
