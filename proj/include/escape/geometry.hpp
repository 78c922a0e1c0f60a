#pragma once

#include <cmath>
#include <vector>

namespace escape {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Real 2x2 matrix acting on column vectors.
struct Mat2 {
  double a = 1, b = 0, c = 0, d = 1;

  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  double det() const { return a * d - b * c; }
  Mat2 inverse() const {
    double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
};

// Convex polygon, counterclockwise vertex loop, no repeated closing vertex.
using Polygon = std::vector<Vec2>;

struct Segment {
  Vec2 a, b;
};

double signed_area(const Polygon& p);
inline double area(const Polygon& p) { return std::abs(signed_area(p)); }
Vec2 centroid(const Polygon& p);
void make_ccw(Polygon& p);

Polygon translate(const Polygon& p, Vec2 t);
Polygon transform(const Polygon& p, const Mat2& m, Vec2 t = {});

// Keep the part of p with dot(n, x) <= c.
Polygon clip_halfplane(const Polygon& p, Vec2 n, double c);
Polygon clip_box(const Polygon& p, double x0, double x1, double y0, double y1);
// Intersection of two convex polygons (clip must be ccw).
Polygon clip_convex(const Polygon& subject, const Polygon& clip);
double intersection_area(const Polygon& a, const Polygon& b);

struct Box {
  double x0, x1, y0, y1;
};
Box bounding_box(const Polygon& p);
inline bool boxes_overlap(const Box& a, const Box& b, double pad = 0.0) {
  return a.x0 < b.x1 + pad && b.x0 < a.x1 + pad && a.y0 < b.y1 + pad && b.y0 < a.y1 + pad;
}

bool strictly_inside(const Polygon& p, Vec2 q, double eps = 1e-12);
bool inside_or_on(const Polygon& p, Vec2 q, double eps = 1e-12);

double point_segment_distance(Vec2 p, Segment s);
bool segments_intersect(Segment s, Segment t);
double segment_distance(Segment s, Segment t);
// Distance from a segment to a convex polygon region (0 if they meet).
double segment_polygon_distance(Segment s, const Polygon& p);

}  // namespace escape
