#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "escape/geometry.hpp"

namespace escape {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double wrap01(double v) {
  double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}
inline Point2 reduce(Vec2 v) { return {wrap01(v.x), wrap01(v.y)}; }
inline Vec2 vec(Point2 p) { return {p.x, p.y}; }

// Shortest displacement between two torus points.
Vec2 torus_delta(Point2 a, Point2 b);
double torus_distance(Point2 a, Point2 b);

using IntMat2 = std::array<std::array<long long, 2>, 2>;

enum class Orientation { preserving, reversing };

// Hyperbolic linear automorphism x -> A x mod 1.
class TorusMap {
 public:
  explicit TorusMap(IntMat2 matrix);

  static TorusMap cat() { return TorusMap({{{2, 1}, {1, 1}}}); }
  static TorusMap negated_cat() { return TorusMap({{{-2, -1}, {-1, -1}}}); }

  const IntMat2& matrix() const { return m_; }
  Mat2 linear() const { return lin_; }
  Mat2 inverse_linear() const { return inv_; }
  int det() const { return det_; }
  double lambda_u() const { return lu_; }
  double lambda_s() const { return ls_; }
  Vec2 e_u() const { return eu_; }
  Vec2 e_s() const { return es_; }
  Orientation orientation() const {
    return lu_ > 0 ? Orientation::preserving : Orientation::reversing;
  }

  // Coordinates (u, s) with v = u e_u + s e_s.
  Vec2 to_eigen(Vec2 v) const { return to_eig_ * v; }
  Vec2 from_eigen(double u, double s) const { return eu_ * u + es_ * s; }

 private:
  IntMat2 m_;
  Mat2 lin_, inv_, to_eig_;
  int det_;
  double lu_, ls_;
  Vec2 eu_, es_;
};

// (x, y) -> (k x mod 1, (y + floor(k x)) / k) on the unit square.
class BakerMap {
 public:
  explicit BakerMap(int k);
  int k() const { return k_; }

 private:
  int k_;
};

using Map = std::variant<TorusMap, BakerMap>;

Point2 apply(const TorusMap& f, Point2 p);
Point2 apply(const BakerMap& f, Point2 p);
Point2 apply(const Map& f, Point2 p);
Point2 apply_inverse(const TorusMap& f, Point2 p);
Point2 apply_inverse(const BakerMap& f, Point2 p);
Point2 apply_inverse(const Map& f, Point2 p);

double log_expansion(const TorusMap& f);
double log_expansion(const BakerMap& f);
double log_expansion(const Map& f);

// All solutions of (A^p - I) x = 0 mod 1; count is |det(A^p - I)|.
std::vector<Point2> periodic_points(const TorusMap& f, int period);

// Exact rational point x = xnum/xden, y = ynum/yden, for baker oracles.
struct ExactPoint {
  unsigned __int128 xnum = 0, xden = 1;
  unsigned __int128 ynum = 0, yden = 1;
};
ExactPoint apply_exact(const BakerMap& f, ExactPoint p);

// Piece of a piecewise-affine map: on `domain`, f(v) = linear * v + shift.
struct AffinePiece {
  Polygon domain;
  Mat2 linear;
  Vec2 shift;
};
std::vector<AffinePiece> affine_pieces(const Map& f);
std::vector<AffinePiece> inverse_affine_pieces(const Map& f);

std::string describe(const Map& f);

}  // namespace escape
