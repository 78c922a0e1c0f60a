#include "escape/holes.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>
#include <optional>

#include "escape/errors.hpp"
#include "escape/symbolic.hpp"

namespace escape {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Polygon unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

// Integer shifts n with (object + n) overlapping target (padded).
template <class Fn>
void for_each_shift(const Box& target, const Box& object, double pad, Fn&& fn) {
  const int nx0 = int(std::floor(target.x0 - pad - object.x1)) - 1;
  const int nx1 = int(std::ceil(target.x1 + pad - object.x0)) + 1;
  const int ny0 = int(std::floor(target.y0 - pad - object.y1)) - 1;
  const int ny1 = int(std::ceil(target.y1 + pad - object.y0)) + 1;
  for (int nx = nx0; nx <= nx1; ++nx)
    for (int ny = ny0; ny <= ny1; ++ny) {
      const Box b{object.x0 + nx, object.x1 + nx, object.y0 + ny, object.y1 + ny};
      if (boxes_overlap(target, b, pad)) fn(Vec2{double(nx), double(ny)});
    }
}

Box seg_box(const Segment& s) {
  return {std::min(s.a.x, s.b.x), std::max(s.a.x, s.b.x), std::min(s.a.y, s.b.y),
          std::max(s.a.y, s.b.y)};
}

Vec2 outward_normal(Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  return Vec2{e.y, -e.x} * (1.0 / norm(e));
}

// Part of convex p outside the half-plane interior of edge (a, b) of a ccw polygon.
Polygon outside_of_edge(const Polygon& p, Vec2 a, Vec2 b) {
  const Vec2 n = outward_normal(a, b);
  return clip_halfplane(p, -n, -dot(n, a));
}

Polygon inside_of_edge(const Polygon& p, Vec2 a, Vec2 b) {
  const Vec2 n = outward_normal(a, b);
  return clip_halfplane(p, n, dot(n, a));
}

}  // namespace

Hole::Hole(std::vector<Polygon> components, HoleKind kind, const TorusMap* map) : kind_(kind) {
  for (auto& c : components) {
    if (c.size() < 3) throw ConfigError("hole component needs at least 3 vertices");
    make_ccw(c);
    const double a = escape::area(c);
    if (a <= 1e-15) throw ConfigError("hole component has no area");
    const Vec2 g = centroid(c);
    c = translate(c, {-std::floor(g.x), -std::floor(g.y)});
    area_ += a;
    comps_.push_back(std::move(c));
  }
  for (const auto& c : comps_) boxes_.push_back(bounding_box(c));
  // Pairwise disjointness, including a component against its own translates.
  for (std::size_t i = 0; i < comps_.size(); ++i)
    for (std::size_t j = i; j < comps_.size(); ++j)
      for_each_shift(boxes_[i], boxes_[j], 0.0, [&](Vec2 n) {
        if (i == j && n.x == 0 && n.y == 0) return;
        const double ov = escape::area(clip_convex(comps_[i], translate(comps_[j], n)));
        if (ov > 1e-12) throw ConfigError("hole components overlap on the torus");
      });
  if (area_ > 1.0 + 1e-9) throw ConfigError("hole area exceeds the torus");
  build_index();
  build_boundary(map);
  if (kind_ == HoleKind::regular) {
    if (!map) throw ConfigError("regular hole needs the ambient toral map for edge tags");
    for (const auto& e : boundary_)
      if (e.tag == EdgeTag::none)
        throw ConfigError("regular hole has a boundary edge that is neither stable nor unstable");
  }
}

Hole Hole::complement_of(const std::vector<Polygon>& windows, HoleKind kind, const TorusMap* map) {
  std::vector<Polygon> pieces{unit_square()};
  const Box unit{0, 1, 0, 1};
  for (Polygon w : windows) {
    make_ccw(w);
    for_each_shift(unit, bounding_box(w), 0.0, [&](Vec2 n) {
      const Polygon ws = translate(w, n);
      std::vector<Polygon> next;
      for (const auto& p : pieces) {
        if (intersection_area(p, ws) <= 1e-15) {
          next.push_back(p);
          continue;
        }
        // p \ ws as a disjoint union of convex parts.
        Polygon rest = p;
        for (std::size_t i = 0; i < ws.size() && !rest.empty(); ++i) {
          const Vec2 a = ws[i], b = ws[(i + 1) % ws.size()];
          Polygon part = outside_of_edge(rest, a, b);
          if (escape::area(part) > 1e-15) next.push_back(std::move(part));
          rest = inside_of_edge(rest, a, b);
        }
      }
      pieces = std::move(next);
    });
  }
  return Hole(std::move(pieces), kind, map);
}

void Hole::build_index() {
  const int G = kGrid;
  cand_.assign(std::size_t(G) * G, {});
  full_.assign(std::size_t(G) * G, 0);
  const double h = 1.0 / G;
  const Box unit{0, 1, 0, 1};
  for (int c = 0; c < int(comps_.size()); ++c) {
    for_each_shift(unit, boxes_[c], 0.0, [&](Vec2 n) {
      const Box b{boxes_[c].x0 + n.x, boxes_[c].x1 + n.x, boxes_[c].y0 + n.y, boxes_[c].y1 + n.y};
      const int ix0 = std::max(0, int(std::floor(b.x0 * G))), ix1 = std::min(G - 1, int(b.x1 * G));
      const int iy0 = std::max(0, int(std::floor(b.y0 * G))), iy1 = std::min(G - 1, int(b.y1 * G));
      const Polygon shifted = translate(comps_[c], n);
      for (int ix = ix0; ix <= ix1; ++ix)
        for (int iy = iy0; iy <= iy1; ++iy) {
          const std::size_t id = std::size_t(iy) * G + ix;
          if (full_[id]) continue;
          const double x0 = ix * h, y0 = iy * h;
          const Polygon cell{{x0, y0}, {x0 + h, y0}, {x0 + h, y0 + h}, {x0, y0 + h}};
          bool all_in = true;
          for (auto v : cell) all_in = all_in && strictly_inside(shifted, v);
          if (all_in) {
            full_[id] = 1;
            cand_[id].clear();
            continue;
          }
          if (escape::area(clip_convex(cell, shifted)) > 0 || inside_or_on(shifted, {x0, y0}))
            cand_[id].push_back({c, n});
        }
    });
  }
}

void Hole::build_boundary(const TorusMap* map) {
  struct E {
    Vec2 a, b;
  };
  std::vector<E> edges;
  for (const auto& c : comps_)
    for (std::size_t i = 0; i < c.size(); ++i) edges.push_back({c[i], c[(i + 1) % c.size()]});
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Vec2 a = edges[i].a, d = edges[i].b - edges[i].a;
    const double len = norm(d);
    std::vector<std::pair<double, double>> cuts;
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const Vec2 dj = edges[j].b - edges[j].a;
      if (std::abs(cross(d, dj)) > 1e-10 * len * norm(dj) || dot(d, dj) >= 0) continue;
      for (int nx = -1; nx <= 1; ++nx)
        for (int ny = -1; ny <= 1; ++ny) {
          const Vec2 n{double(nx), double(ny)};
          const Vec2 pa = edges[j].a + n, pb = edges[j].b + n;
          if (std::abs(cross(d, pa - a)) > 1e-10 * len) continue;
          double ta = dot(pa - a, d) / (len * len), tb = dot(pb - a, d) / (len * len);
          if (ta > tb) std::swap(ta, tb);
          ta = std::max(ta, 0.0);
          tb = std::min(tb, 1.0);
          if (tb - ta > 1e-12) cuts.push_back({ta, tb});
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double cur = 0.0;
    auto emit = [&](double t0, double t1) {
      if ((t1 - t0) * len <= 1e-12) return;
      Segment s{a + d * t0, a + d * t1};
      const Vec2 mid = (s.a + s.b) * 0.5;
      const Vec2 sh{-std::floor(mid.x), -std::floor(mid.y)};
      s.a += sh;
      s.b += sh;
      EdgeTag tag = EdgeTag::none;
      if (map) {
        const Vec2 u = d * (1.0 / len);
        if (std::abs(cross(u, map->e_u())) <= 1e-9)
          tag = EdgeTag::unstable;
        else if (std::abs(cross(u, map->e_s())) <= 1e-9)
          tag = EdgeTag::stable;
      }
      boundary_.push_back({s, tag});
    };
    for (auto [c0, c1] : cuts) {
      if (c0 > cur) emit(cur, c0);
      cur = std::max(cur, c1);
    }
    if (cur < 1.0) emit(cur, 1.0);
  }
}

bool Hole::contains(Point2 p) const {
  if (comps_.empty()) return false;
  const int G = kGrid;
  const int ix = std::min(G - 1, int(p.x * G)), iy = std::min(G - 1, int(p.y * G));
  const std::size_t id = std::size_t(iy) * G + ix;
  if (full_[id]) return true;
  const Vec2 q = vec(p);
  bool on_edge = false;
  for (const auto& c : cand_[id]) {
    if (strictly_inside(comps_[c.comp], q - c.shift)) return true;
    on_edge = on_edge || inside_or_on(comps_[c.comp], q - c.shift);
  }
  // A seam shared by two components is interior to the union.
  return on_edge && boundary_distance(p) > 1e-12;
}

int Hole::quick_box_state(const Box& b) const {
  if (comps_.empty()) return 0;
  const int G = kGrid;
  const int ix0 = std::clamp(int(std::floor(b.x0 * G)), 0, G - 1), ix1 = std::clamp(int(std::ceil(b.x1 * G)) - 1, 0, G - 1);
  const int iy0 = std::clamp(int(std::floor(b.y0 * G)), 0, G - 1), iy1 = std::clamp(int(std::ceil(b.y1 * G)) - 1, 0, G - 1);
  bool all_full = true, all_empty = true;
  for (int iy = iy0; iy <= iy1; ++iy)
    for (int ix = ix0; ix <= ix1; ++ix) {
      const std::size_t id = std::size_t(iy) * G + ix;
      all_full = all_full && full_[id];
      all_empty = all_empty && !full_[id] && cand_[id].empty();
    }
  return all_full ? 1 : all_empty ? 0 : -1;
}

double Hole::inside_area(const Polygon& poly) const {
  if (comps_.empty()) return 0.0;
  const Box pb = bounding_box(poly);
  double total = 0.0;
  for (std::size_t c = 0; c < comps_.size(); ++c)
    for_each_shift(pb, boxes_[c], 0.0, [&](Vec2 n) {
      total += escape::area(clip_convex(poly, translate(comps_[c], n)));
    });
  return total;
}

bool Hole::covers_closed(const Polygon& poly) const {
  if (comps_.empty()) return false;
  const double a = escape::area(poly);
  if (inside_area(poly) < a * (1.0 - 1e-12)) return false;
  return boundary_distance(poly) > 1e-13;
}

double Hole::boundary_distance(const Polygon& poly) const {
  double best = kInf;
  const Box pb = bounding_box(poly);
  for (const auto& e : boundary_)
    for_each_shift(pb, seg_box(e.seg), 1.0, [&](Vec2 n) {
      if (best == 0.0) return;
      best = std::min(best, segment_polygon_distance({e.seg.a + n, e.seg.b + n}, poly));
    });
  return best;
}

bool Hole::boundary_meets(const Polygon& poly) const {
  const Box pb = bounding_box(poly);
  bool hit = false;
  for (const auto& e : boundary_) {
    for_each_shift(pb, seg_box(e.seg), 1e-12, [&](Vec2 n) {
      if (hit) return;
      // Near-contact counts as contact: callers use this for sound exclusion.
      hit = segment_polygon_distance({e.seg.a + n, e.seg.b + n}, poly) <= 1e-12;
    });
    if (hit) return true;
  }
  return false;
}

double Hole::boundary_distance(Point2 p) const {
  double best = kInf;
  const Vec2 q = vec(p);
  for (const auto& e : boundary_)
    for_each_shift({q.x, q.x, q.y, q.y}, seg_box(e.seg), 1.0, [&](Vec2 n) {
      best = std::min(best, point_segment_distance(q, {e.seg.a + n, e.seg.b + n}));
    });
  return best;
}

namespace {

// Squared distance from x(τ) = a + τ d to a segment, as quadratic pieces in τ.
struct Piece {
  double lo, hi, c2, c1, c0;
  double eval(double t) const { return (c2 * t + c1) * t + c0; }
};

void point_pieces(Vec2 a, Vec2 d, Vec2 p, double lo, double hi, std::vector<Piece>& out) {
  if (hi <= lo) return;
  const Vec2 w = a - p;
  out.push_back({lo, hi, dot(d, d), 2 * dot(d, w), dot(w, w)});
}

std::vector<Piece> distance_pieces(Vec2 a, Vec2 d, Segment s) {
  std::vector<Piece> out;
  const Vec2 e = s.b - s.a;
  const double e2 = dot(e, e);
  // σ(τ) = projection parameter on s, linear in τ.
  const double s0 = dot(a - s.a, e) / e2, s1 = dot(d, e) / e2;
  double t0 = -kInf, t1 = kInf;  // τ range where σ in [0,1]
  if (std::abs(s1) > 1e-300) {
    t0 = (0 - s0) / s1;
    t1 = (1 - s0) / s1;
    if (t0 > t1) std::swap(t0, t1);
  } else if (s0 < 0 || s0 > 1) {
    t0 = kInf;
    t1 = kInf;
  }
  const double lo = std::clamp(t0, 0.0, 1.0), hi = std::clamp(t1, 0.0, 1.0);
  // Middle: squared distance to the line.
  if (hi > lo) {
    const double k0 = cross(e, a - s.a) / std::sqrt(e2), k1 = cross(e, d) / std::sqrt(e2);
    out.push_back({lo, hi, k1 * k1, 2 * k0 * k1, k0 * k0});
  }
  // Outside pieces: nearest endpoint depends on the side.
  auto endpoint_for = [&](double tm) { return s0 + s1 * tm < 0 ? s.a : s.b; };
  if (lo > 0) point_pieces(a, d, endpoint_for(0.5 * lo), 0.0, lo, out);
  if (hi < 1) point_pieces(a, d, endpoint_for(0.5 * (hi + 1)), hi, 1.0, out);
  return out;
}

double eval_min(const std::vector<std::vector<Piece>>& fns, double t) {
  double best = kInf;
  for (const auto& f : fns)
    for (const auto& p : f)
      if (t >= p.lo - 1e-15 && t <= p.hi + 1e-15) best = std::min(best, p.eval(t));
  return best;
}

// sup over x in s of the torus distance from x to the segment set.
double directed(const Segment& s, const std::vector<BoundaryEdge>& other) {
  const Vec2 a = s.a, d = s.b - s.a;
  std::vector<Segment> cands;
  for (const auto& e : other)
    for (int nx = -2; nx <= 2; ++nx)
      for (int ny = -2; ny <= 2; ++ny)
        cands.push_back({e.seg.a + Vec2{double(nx), double(ny)}, e.seg.b + Vec2{double(nx), double(ny)}});
  double ub = kInf;
  for (const auto& c : cands)
    ub = std::min(ub, std::max(point_segment_distance(s.a, c), point_segment_distance(s.b, c)));
  std::vector<std::vector<Piece>> fns;
  for (const auto& c : cands)
    if (segment_distance(s, c) <= ub + 1e-12) fns.push_back(distance_pieces(a, d, c));
  std::vector<double> ts{0.0, 1.0};
  for (std::size_t i = 0; i < fns.size(); ++i)
    for (std::size_t j = i + 1; j < fns.size(); ++j)
      for (const auto& p : fns[i])
        for (const auto& q : fns[j]) {
          const double lo = std::max(p.lo, q.lo), hi = std::min(p.hi, q.hi);
          if (hi < lo) continue;
          const double A = p.c2 - q.c2, B = p.c1 - q.c1, C = p.c0 - q.c0;
          auto push = [&](double t) {
            if (t >= lo && t <= hi) ts.push_back(t);
          };
          if (std::abs(A) < 1e-14 * (std::abs(p.c2) + std::abs(q.c2) + 1e-300)) {
            if (std::abs(B) > 1e-300) push(-C / B);
          } else {
            const double disc = B * B - 4 * A * C;
            if (disc >= 0) {
              const double r = std::sqrt(disc);
              const double qq = -0.5 * (B + (B >= 0 ? r : -r));
              push(qq / A);
              if (qq != 0) push(C / qq);
            }
          }
        }
  double sup = 0.0;
  for (double t : ts) sup = std::max(sup, eval_min(fns, t));
  return std::sqrt(std::max(sup, 0.0));
}

}  // namespace

double hausdorff_boundary_distance(const Hole& h1, const Hole& h2) {
  if (h1.empty() || h2.empty()) throw ConfigError("hausdorff distance of an empty hole");
  const auto& b1 = h1.boundary();
  const auto& b2 = h2.boundary();
  if (b1.empty() && b2.empty()) return 0.0;
  if (b1.empty() || b2.empty()) return kInf;
  double d = 0.0;
  for (const auto& e : b1) d = std::max(d, directed(e.seg, b2));
  for (const auto& e : b2) d = std::max(d, directed(e.seg, b1));
  return d;
}

double overlap_area(const Hole& h1, const Hole& h2) {
  double total = 0.0;
  for (const auto& c : h1.components()) total += h2.inside_area(c);
  return total;
}

double symmetric_difference_area(const Hole& h1, const Hole& h2) {
  return std::max(0.0, h1.area() + h2.area() - 2.0 * overlap_area(h1, h2));
}

Polygon eigen_rect(const TorusMap& f, double u0, double u1, double s0, double s1) {
  Polygon p{f.from_eigen(u0, s0), f.from_eigen(u1, s0), f.from_eigen(u1, s1), f.from_eigen(u0, s1)};
  make_ccw(p);
  return p;
}

Hole regular_hole_through_fixed_point(const TorusMap& f, Side side, double width, double height,
                                      double offset) {
  if (!(width > 0 && width < 0.4) || !(height > 0 && height < 0.4))
    throw ConfigError("regular hole: width and height must lie in (0, 0.4)");
  const double u0 = side == Side::left ? -width - offset : offset;
  const double u1 = side == Side::left ? -offset : offset + width;
  return Hole({eigen_rect(f, u0, u1, -height, height)}, HoleKind::regular, &f);
}

Hole markov_hole(const std::vector<int>& cells, const MarkovPartition& partition) {
  if (cells.empty()) throw ConfigError("markov hole: empty cell set");
  std::vector<Polygon> comps;
  for (int c : cells) {
    if (c < 0 || c >= partition.size()) throw ConfigError("markov hole: unknown cell id");
    comps.push_back(partition.cell(c));
  }
  return Hole(std::move(comps), HoleKind::markov);
}

namespace {

struct Line {
  Vec2 n;  // unit outward normal
  double c;
};

std::vector<Line> lines_of(const Polygon& p) {
  std::vector<Line> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % p.size()];
    const Vec2 n = outward_normal(a, b);
    out.push_back({n, dot(n, a)});
  }
  return out;
}

Polygon from_lines(const std::vector<Line>& ls, const Polygon& ref) {
  const std::size_t m = ls.size();
  Polygon out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Line& l1 = ls[(i + m - 1) % m];
    const Line& l2 = ls[i];
    const double det = l1.n.x * l2.n.y - l1.n.y * l2.n.x;
    out[i] = {(l1.c * l2.n.y - l1.n.y * l2.c) / det, (l1.n.x * l2.c - l1.c * l2.n.x) / det};
  }
  // Every edge must keep its orientation; otherwise the offset collapsed it.
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 e0 = ref[(i + 1) % m] - ref[i], e1 = out[(i + 1) % m] - out[i];
    if (dot(e0, e1) <= 0) throw ConfigError("polygon offset collapses an edge");
  }
  return out;
}

}  // namespace

Polygon offset_convex(const Polygon& p, double d) {
  Polygon q = p;
  make_ccw(q);
  auto ls = lines_of(q);
  for (auto& l : ls) l.c += d;
  return from_lines(ls, q);
}

Polygon slide_edge(const Polygon& p, int edge, double d) {
  Polygon q = p;
  if (signed_area(q) < 0) throw ConfigError("slide_edge expects a ccw polygon");
  auto ls = lines_of(q);
  if (edge < 0 || edge >= int(ls.size())) throw ConfigError("slide_edge: edge index out of range");
  ls[std::size_t(edge)].c += d;
  return from_lines(ls, q);
}

double min_interior_angle(const Polygon& p) {
  double best = std::numbers::pi;
  const std::size_t m = p.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 u = p[(i + m - 1) % m] - p[i], v = p[(i + 1) % m] - p[i];
    best = std::min(best, std::acos(std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0)));
  }
  return best;
}

namespace {

double vertex_angle(const Polygon& p, std::size_t i) {
  const std::size_t m = p.size();
  const Vec2 u = p[(i + m - 1) % m] - p[i], v = p[(i + 1) % m] - p[i];
  return std::acos(std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0));
}

}  // namespace

std::vector<double> HoleFamily::grid() const {
  std::vector<double> ts;
  const int n = spec.samples;
  for (int i = 0; i < n; ++i)
    ts.push_back(n == 1 ? spec.t_min : spec.t_min + (spec.t_max - spec.t_min) * i / (n - 1));
  return ts;
}

HoleFamily make_family(const FamilySpec& spec, const TorusMap* map) {
  if (spec.polygons.empty()) throw ConfigError("family needs at least one polygon");
  if (!(spec.t_max > spec.t_min)) throw ConfigError("family parameter range is empty");
  HoleFamily fam;
  fam.spec = spec;
  for (auto& p : fam.spec.polygons) make_ccw(p);
  for (auto& p : fam.spec.fixed_windows) make_ccw(p);
  const FamilySpec s = fam.spec;
  // Held by value so the family may outlive the caller's map.
  std::optional<TorusMap> owned;
  if (map) owned = *map;
  auto finish = [s, owned](std::vector<Polygon> polys) {
    const TorusMap* m = owned ? &*owned : nullptr;
    if (s.complement) {
      polys.insert(polys.end(), s.fixed_windows.begin(), s.fixed_windows.end());
      return Hole::complement_of(polys, s.kind, m);
    }
    return Hole(std::move(polys), s.kind, m);
  };
  const double sign = s.complement ? -1.0 : 1.0;  // complement: windows shrink as the hole grows
  switch (s.mode) {
    case FamilyMode::constant:
      fam.lipschitz_cert = true;
      fam.generator = [finish, s](double) { return finish(s.polygons); };
      break;
    case FamilyMode::nested: {
      double theta = std::numbers::pi;
      for (const auto& p : s.polygons) theta = std::min(theta, min_interior_angle(p));
      const double rate = std::sin(0.5 * theta);
      fam.lipschitz_cert = true;
      fam.monotone_increasing = true;
      fam.generator = [finish, s, rate, sign](double t) {
        std::vector<Polygon> polys;
        for (const auto& p : s.polygons) polys.push_back(offset_convex(p, sign * rate * t));
        return finish(polys);
      };
      break;
    }
    case FamilyMode::translate: {
      const Vec2 dir = s.direction * (1.0 / norm(s.direction));
      fam.lipschitz_cert = true;
      fam.generator = [finish, s, dir](double t) {
        std::vector<Polygon> polys;
        for (const auto& p : s.polygons) polys.push_back(translate(p, dir * t));
        return finish(polys);
      };
      break;
    }
    case FamilyMode::slide: {
      if (s.polygon < 0 || s.polygon >= int(s.polygons.size()))
        throw ConfigError("slide family: polygon index out of range");
      const Polygon& p = s.polygons[std::size_t(s.polygon)];
      if (s.edge < 0 || s.edge >= int(p.size())) throw ConfigError("slide family: edge out of range");
      const std::size_t e = std::size_t(s.edge);
      const double rate =
          std::min(std::sin(vertex_angle(p, e)), std::sin(vertex_angle(p, (e + 1) % p.size())));
      fam.lipschitz_cert = true;
      fam.monotone_increasing = true;
      fam.generator = [finish, s, rate, sign](double t) {
        std::vector<Polygon> polys = s.polygons;
        auto& q = polys[std::size_t(s.polygon)];
        q = slide_edge(q, s.edge, sign * rate * t);
        return finish(polys);
      };
      break;
    }
  }
  return fam;
}

std::vector<double> window_survival_areas(const TorusMap& f, const std::vector<Polygon>& windows_in, int n_max,
                                          std::size_t max_pieces) {
  if (windows_in.empty()) throw ConfigError("window survival: no windows");
  if (n_max < 0) throw ConfigError("window survival: horizon must be nonnegative");
  std::vector<Polygon> windows = windows_in;
  std::vector<Box> wbox;
  for (auto& w : windows) {
    make_ccw(w);
    wbox.push_back(bounding_box(w));
  }
  for (std::size_t i = 0; i < windows.size(); ++i)
    for (std::size_t j = i; j < windows.size(); ++j)
      for_each_shift(wbox[i], wbox[j], 0.0, [&](Vec2 n) {
        if (i == j && n.x == 0 && n.y == 0) return;
        if (intersection_area(windows[i], translate(windows[j], n)) > 1e-12)
          throw ConfigError("window survival: windows overlap on the torus");
      });
  const Mat2 inv = f.inverse_linear();
  std::vector<Polygon> pieces = windows;
  std::vector<double> areas;
  auto total = [&] {
    double a = 0;
    for (const auto& p : pieces) a += escape::area(p);
    return a;
  };
  areas.push_back(total());
  for (int n = 1; n <= n_max; ++n) {
    std::vector<Polygon> next;
    for (const auto& p : pieces) {
      const Polygon q = transform(p, inv);
      const Box qb = bounding_box(q);
      for (std::size_t w = 0; w < windows.size(); ++w)
        for_each_shift(wbox[w], qb, 0.0, [&](Vec2 m) {
          Polygon c = clip_convex(translate(q, m), windows[w]);
          if (c.size() >= 3 && escape::area(c) > 0.0) next.push_back(std::move(c));
        });
      if (next.size() > max_pieces) throw CapExceeded("window survival: piece count above cap");
    }
    pieces = std::move(next);
    areas.push_back(total());
    if (pieces.empty()) {
      areas.resize(std::size_t(n_max) + 1, 0.0);
      break;
    }
  }
  return areas;
}

}  // namespace escape
