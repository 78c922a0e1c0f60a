#include "escape/dynsys.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "escape/errors.hpp"

namespace escape {

Vec2 torus_delta(Point2 a, Point2 b) {
  double dx = b.x - a.x, dy = b.y - a.y;
  dx -= std::round(dx);
  dy -= std::round(dy);
  return {dx, dy};
}

double torus_distance(Point2 a, Point2 b) { return norm(torus_delta(a, b)); }

namespace {

Vec2 eigenvector(const IntMat2& m, double lam) {
  const double a = double(m[0][0]), b = double(m[0][1]), c = double(m[1][0]), d = double(m[1][1]);
  Vec2 v;
  // Pick the better-conditioned row of (A - lam I).
  if (std::abs(b) + std::abs(lam - a) >= std::abs(c) + std::abs(lam - d))
    v = {b, lam - a};
  else
    v = {lam - d, c};
  return v * (1.0 / norm(v));
}

}  // namespace

TorusMap::TorusMap(IntMat2 matrix) : m_(matrix) {
  const long long tr = m_[0][0] + m_[1][1];
  const long long dt = m_[0][0] * m_[1][1] - m_[0][1] * m_[1][0];
  if (dt != 1 && dt != -1) throw ConfigError("toral map: |det| must be 1");
  if (std::llabs(tr) <= 2) throw ConfigError("toral map: |trace| must exceed 2 (hyperbolic)");
  det_ = int(dt);
  lin_ = {double(m_[0][0]), double(m_[0][1]), double(m_[1][0]), double(m_[1][1])};
  inv_ = {double(dt * m_[1][1]), double(-dt * m_[0][1]), double(-dt * m_[1][0]),
          double(dt * m_[0][0])};
  const double T = double(tr);
  const double disc = std::sqrt(T * T - 4.0 * double(dt));
  // Larger-magnitude root computed directly, the other from the product to avoid cancellation.
  lu_ = T > 0 ? 0.5 * (T + disc) : 0.5 * (T - disc);
  ls_ = double(dt) / lu_;
  eu_ = eigenvector(m_, lu_);
  es_ = eigenvector(m_, ls_);
  if (eu_.x < 0 || (eu_.x == 0 && eu_.y < 0)) eu_ = -eu_;
  if (es_.y < 0 || (es_.y == 0 && es_.x < 0)) es_ = -es_;
  to_eig_ = Mat2{eu_.x, es_.x, eu_.y, es_.y}.inverse();
}

BakerMap::BakerMap(int k) : k_(k) {
  if (k < 2) throw ConfigError("baker map: branch count k must be >= 2");
}

Point2 apply(const TorusMap& f, Point2 p) { return reduce(f.linear() * vec(p)); }

Point2 apply(const BakerMap& f, Point2 p) {
  const double kx = f.k() * p.x;
  double d = std::floor(kx);
  if (d >= f.k()) d = f.k() - 1;
  return {wrap01(kx - d), (p.y + d) / f.k()};
}

Point2 apply(const Map& f, Point2 p) {
  return std::visit([&](const auto& m) { return apply(m, p); }, f);
}

Point2 apply_inverse(const TorusMap& f, Point2 p) { return reduce(f.inverse_linear() * vec(p)); }

Point2 apply_inverse(const BakerMap& f, Point2 p) {
  const double ky = f.k() * p.y;
  double d = std::floor(ky);
  if (d >= f.k()) d = f.k() - 1;
  return {(p.x + d) / f.k(), wrap01(ky - d)};
}

Point2 apply_inverse(const Map& f, Point2 p) {
  return std::visit([&](const auto& m) { return apply_inverse(m, p); }, f);
}

double log_expansion(const TorusMap& f) { return std::log(std::abs(f.lambda_u())); }
double log_expansion(const BakerMap& f) { return std::log(double(f.k())); }
double log_expansion(const Map& f) {
  return std::visit([](const auto& m) { return log_expansion(m); }, f);
}

namespace {

using LL = long long;
struct IM {
  LL a, b, c, d;
};

IM mul(const IM& x, const IM& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

}  // namespace

std::vector<Point2> periodic_points(const TorusMap& f, int period) {
  if (period < 1 || period > 12) throw ConfigError("periodic_points: period must be in [1, 12]");
  const auto& m = f.matrix();
  IM A{m[0][0], m[0][1], m[1][0], m[1][1]};
  IM P{1, 0, 0, 1};
  for (int i = 0; i < period; ++i) P = mul(P, A);
  // Smith normal form by row and column operations; only the column
  // transform V is needed: (A^p - I) x in Z^2  <=>  x = V (i/d1, j/d2).
  LL M[2][2] = {{P.a - 1, P.b}, {P.c, P.d - 1}};
  LL V[2][2] = {{1, 0}, {0, 1}};
  auto swap_cols = [&] {
    for (int r = 0; r < 2; ++r) {
      std::swap(M[r][0], M[r][1]);
      std::swap(V[r][0], V[r][1]);
    }
  };
  for (int guard = 0; guard < 256; ++guard) {
    // Move the smallest nonzero entry to (0,0).
    int bi = -1, bj = -1;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (M[i][j] != 0 && (bi < 0 || std::llabs(M[i][j]) < std::llabs(M[bi][bj]))) {
          bi = i;
          bj = j;
        }
    if (bi < 0) throw ConfigError("periodic_points: singular A^p - I");
    if (bi == 1) std::swap(M[0], M[1]);
    if (bj == 1) swap_cols();
    const LL p = M[0][0];
    const LL q1 = M[1][0] / p;
    M[1][0] -= q1 * p;
    M[1][1] -= q1 * M[0][1];
    const LL q2 = M[0][1] / p;
    M[0][1] -= q2 * p;
    M[1][1] -= q2 * M[1][0];
    V[0][1] -= q2 * V[0][0];
    V[1][1] -= q2 * V[1][0];
    if (M[1][0] != 0 || M[0][1] != 0) continue;
    if (M[1][1] % M[0][0] == 0) break;
    M[0][1] += M[1][1];  // fold row 1 into row 0 to continue the gcd descent
  }
  const LL d1 = std::llabs(M[0][0]), d2 = std::llabs(M[1][1]);
  const LL scale = d2 / d1;
  std::vector<Point2> pts;
  pts.reserve(std::size_t(d1 * d2));
  auto md = [](LL v, LL n) { return ((v % n) + n) % n; };
  for (LL i = 0; i < d1; ++i)
    for (LL j = 0; j < d2; ++j) {
      const LL nx = md(md(V[0][0] * i, d2) * scale + md(V[0][1] * j, d2), d2);
      const LL ny = md(md(V[1][0] * i, d2) * scale + md(V[1][1] * j, d2), d2);
      pts.push_back({double(nx) / double(d2), double(ny) / double(d2)});
    }
  return pts;
}

ExactPoint apply_exact(const BakerMap& f, ExactPoint p) {
  const unsigned __int128 k = unsigned(f.k());
  const unsigned __int128 kx = k * p.xnum;
  const unsigned __int128 d = kx / p.xden;
  ExactPoint q;
  q.xnum = kx - d * p.xden;
  q.xden = p.xden;
  q.ynum = p.ynum + d * p.yden;
  q.yden = p.yden * k;
  return q;
}

std::vector<AffinePiece> affine_pieces(const Map& f) {
  const Polygon unit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  if (auto t = std::get_if<TorusMap>(&f)) return {{unit, t->linear(), {0, 0}}};
  const int k = std::get<BakerMap>(f).k();
  std::vector<AffinePiece> out;
  for (int j = 0; j < k; ++j) {
    const double x0 = double(j) / k, x1 = double(j + 1) / k;
    out.push_back({{{x0, 0}, {x1, 0}, {x1, 1}, {x0, 1}},
                   Mat2{double(k), 0, 0, 1.0 / k},
                   {-double(j), double(j) / k}});
  }
  return out;
}

std::vector<AffinePiece> inverse_affine_pieces(const Map& f) {
  const Polygon unit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  if (auto t = std::get_if<TorusMap>(&f)) return {{unit, t->inverse_linear(), {0, 0}}};
  const int k = std::get<BakerMap>(f).k();
  std::vector<AffinePiece> out;
  for (int j = 0; j < k; ++j) {
    const double y0 = double(j) / k, y1 = double(j + 1) / k;
    out.push_back({{{0, y0}, {1, y0}, {1, y1}, {0, y1}},
                   Mat2{1.0 / k, 0, 0, double(k)},
                   {double(j) / k, -double(j)}});
  }
  return out;
}

std::string describe(const Map& f) {
  std::ostringstream os;
  if (auto t = std::get_if<TorusMap>(&f)) {
    const auto& m = t->matrix();
    os << "toral [[" << m[0][0] << "," << m[0][1] << "],[" << m[1][0] << "," << m[1][1] << "]]";
  } else {
    os << "baker k=" << std::get<BakerMap>(f).k();
  }
  return os.str();
}

}  // namespace escape
