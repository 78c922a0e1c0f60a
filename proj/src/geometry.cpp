#include "escape/geometry.hpp"

#include <algorithm>
#include <limits>

namespace escape {

double signed_area(const Polygon& p) {
  double s = 0.0;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(p[i], p[(i + 1) % n]);
  return 0.5 * s;
}

Vec2 centroid(const Polygon& p) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 u = p[i], v = p[(i + 1) % n];
    double w = cross(u, v);
    a += w;
    cx += (u.x + v.x) * w;
    cy += (u.y + v.y) * w;
  }
  if (std::abs(a) < 1e-300) {
    Vec2 m;
    for (auto q : p) m += q;
    return m * (1.0 / double(std::max<std::size_t>(n, 1)));
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

void make_ccw(Polygon& p) {
  if (signed_area(p) < 0) std::reverse(p.begin(), p.end());
}

Polygon translate(const Polygon& p, Vec2 t) {
  Polygon out(p);
  for (auto& q : out) q += t;
  return out;
}

Polygon transform(const Polygon& p, const Mat2& m, Vec2 t) {
  Polygon out;
  out.reserve(p.size());
  for (auto q : p) out.push_back(m * q + t);
  if (m.det() < 0) std::reverse(out.begin(), out.end());
  return out;
}

Polygon clip_halfplane(const Polygon& p, Vec2 n, double c) {
  Polygon out;
  const std::size_t m = p.size();
  if (m == 0) return out;
  out.reserve(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 cur = p[i], nxt = p[(i + 1) % m];
    const double dc = dot(n, cur) - c, dn = dot(n, nxt) - c;
    if (dc <= 0) out.push_back(cur);
    if ((dc < 0 && dn > 0) || (dc > 0 && dn < 0)) {
      const double t = dc / (dc - dn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  if (out.size() < 3) out.clear();
  return out;
}

Polygon clip_box(const Polygon& p, double x0, double x1, double y0, double y1) {
  Polygon q = clip_halfplane(p, {-1, 0}, -x0);
  q = clip_halfplane(q, {1, 0}, x1);
  q = clip_halfplane(q, {0, -1}, -y0);
  return clip_halfplane(q, {0, 1}, y1);
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  Polygon q = subject;
  const std::size_t m = clip.size();
  for (std::size_t i = 0; i < m && !q.empty(); ++i) {
    const Vec2 a = clip[i], b = clip[(i + 1) % m];
    const Vec2 e = b - a;
    // Interior of a ccw polygon is on the left: cross(e, x - a) >= 0.
    const Vec2 n{e.y, -e.x};
    q = clip_halfplane(q, n, dot(n, a));
  }
  return q;
}

double intersection_area(const Polygon& a, const Polygon& b) {
  if (!boxes_overlap(bounding_box(a), bounding_box(b))) return 0.0;
  return area(clip_convex(a, b));
}

Box bounding_box(const Polygon& p) {
  Box bx{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (auto q : p) {
    bx.x0 = std::min(bx.x0, q.x);
    bx.x1 = std::max(bx.x1, q.x);
    bx.y0 = std::min(bx.y0, q.y);
    bx.y1 = std::max(bx.y1, q.y);
  }
  return bx;
}

bool strictly_inside(const Polygon& p, Vec2 q, double eps) {
  const std::size_t m = p.size();
  if (m < 3) return false;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % m];
    const Vec2 e = b - a;
    if (cross(e, q - a) <= eps * norm(e)) return false;
  }
  return true;
}

bool inside_or_on(const Polygon& p, Vec2 q, double eps) {
  const std::size_t m = p.size();
  if (m < 3) return false;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % m];
    const Vec2 e = b - a;
    if (cross(e, q - a) < -eps * norm(e)) return false;
  }
  return true;
}

double point_segment_distance(Vec2 p, Segment s) {
  const Vec2 d = s.b - s.a;
  const double l2 = dot(d, d);
  double t = l2 > 0 ? dot(p - s.a, d) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (s.a + d * t));
}

bool segments_intersect(Segment s, Segment t) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
  const double d1 = orient(t.a, t.b, s.a), d2 = orient(t.a, t.b, s.b);
  const double d3 = orient(s.a, s.b, t.a), d4 = orient(s.a, s.b, t.b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  constexpr double eps = 1e-15;
  if (std::abs(d1) <= eps && point_segment_distance(s.a, t) <= 1e-14) return true;
  if (std::abs(d2) <= eps && point_segment_distance(s.b, t) <= 1e-14) return true;
  if (std::abs(d3) <= eps && point_segment_distance(t.a, s) <= 1e-14) return true;
  if (std::abs(d4) <= eps && point_segment_distance(t.b, s) <= 1e-14) return true;
  return false;
}

double segment_distance(Segment s, Segment t) {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                   point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

double segment_polygon_distance(Segment s, const Polygon& p) {
  if (inside_or_on(p, s.a, 0.0) || inside_or_on(p, s.b, 0.0)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t m = p.size();
  for (std::size_t i = 0; i < m; ++i) {
    best = std::min(best, segment_distance(s, {p[i], p[(i + 1) % m]}));
    if (best == 0.0) break;
  }
  return best;
}

}  // namespace escape
