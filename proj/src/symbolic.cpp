#include "escape/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "escape/errors.hpp"
#include "escape/holes.hpp"

namespace escape {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEta = 1e-9;

struct Interval {
  double lo, hi;
};

Interval sorted(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }

Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

Polygon rect_polygon(const TorusMap& f, const EigenRect& r) {
  Polygon p{r.center + f.from_eigen(r.u0, r.s0), r.center + f.from_eigen(r.u1, r.s0),
            r.center + f.from_eigen(r.u1, r.s1), r.center + f.from_eigen(r.u0, r.s1)};
  make_ccw(p);
  return p;
}

// Rectangles cut out of the torus by U = {|u| <= a} and S = {|s| <= b}
// through 0, found by casting rays from sample points; empty if (a, b) do
// not close up into a partition.
std::vector<EigenRect> rectangles_for(const TorusMap& f, double a, double b) {
  std::vector<EigenRect> rects;
  const int G = 40;
  const double area_factor = std::abs(cross(f.e_u(), f.e_s()));
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      const Vec2 x{(i + 0.5) / G + 1.234567e-3, (j + 0.5) / G + 2.345678e-3};
      const int fx = int(std::floor(x.x)), fy = int(std::floor(x.y));
      double up = 1e9, um = -1e9, sp = 1e9, sm = -1e9;
      struct Lift {
        double t, sig;
      };
      std::vector<Lift> lifts;
      for (int mx = fx - 4; mx <= fx + 4; ++mx)
        for (int my = fy - 4; my <= fy + 4; ++my) {
          const Vec2 e = f.to_eigen(Vec2{double(mx), double(my)} - x);
          lifts.push_back({e.x, e.y});
        }
      bool on_seg = false;
      for (const auto& l : lifts) {
        if (std::abs(l.sig) <= b + kEta) {  // stable segment through lattice point meets the u-ray
          if (std::abs(l.t) < kEta) on_seg = true;
          if (l.t > 0) up = std::min(up, l.t);
          if (l.t < 0) um = std::max(um, l.t);
        }
        if (std::abs(l.t) <= a + kEta) {
          if (std::abs(l.sig) < kEta) on_seg = true;
          if (l.sig > 0) sp = std::min(sp, l.sig);
          if (l.sig < 0) sm = std::max(sm, l.sig);
        }
      }
      if (on_seg) continue;
      if (up > 3 || um < -3 || sp > 3 || sm < -3) return {};
      // Nothing may cut the interior; every edge must sit on one segment.
      bool cov_up = false, cov_um = false, cov_sp = false, cov_sm = false;
      for (const auto& l : lifts) {
        const bool s_inside = l.t > um + kEta && l.t < up - kEta;
        if (s_inside && l.sig - b < sp - kEta && l.sig + b > sm + kEta) return {};
        const bool u_inside = l.sig > sm + kEta && l.sig < sp - kEta;
        if (u_inside && l.t - a < up - kEta && l.t + a > um + kEta) return {};
        auto covers_s = [&](double lo, double hi) { return l.sig - b <= lo + kEta && l.sig + b >= hi - kEta; };
        auto covers_u = [&](double lo, double hi) { return l.t - a <= lo + kEta && l.t + a >= hi - kEta; };
        if (std::abs(l.t - up) <= kEta && covers_s(sm, sp)) cov_up = true;
        if (std::abs(l.t - um) <= kEta && covers_s(sm, sp)) cov_um = true;
        if (std::abs(l.sig - sp) <= kEta && covers_u(um, up)) cov_sp = true;
        if (std::abs(l.sig - sm) <= kEta && covers_u(um, up)) cov_sm = true;
      }
      if (!(cov_up && cov_um && cov_sp && cov_sm)) return {};
      const Vec2 c = x + f.from_eigen(0.5 * (up + um), 0.5 * (sp + sm));
      const Point2 cr = reduce(c);
      const double hu = 0.5 * (up - um), hs = 0.5 * (sp - sm);
      bool seen = false;
      for (const auto& r : rects)
        if (torus_distance(reduce(r.center), cr) < 1e-7 && std::abs(r.u1 - hu) < 1e-7 &&
            std::abs(r.s1 - hs) < 1e-7)
          seen = true;
      if (!seen) rects.push_back({vec(cr), -hu, hu, -hs, hs});
    }
  double total = 0;
  for (const auto& r : rects) total += (r.u1 - r.u0) * (r.s1 - r.s0) * area_factor;
  if (std::abs(total - 1.0) > 1e-9) return {};
  return rects;
}

// Transitions between base rectangles; empty optional if some crossing is
// not Markov.
std::optional<std::vector<BaseTransition>> transitions_for(const TorusMap& f,
                                                          const std::vector<EigenRect>& rects) {
  std::vector<BaseTransition> out;
  const double lu = f.lambda_u(), ls = f.lambda_s();
  const Mat2 A = f.linear();
  for (int ia = 0; ia < int(rects.size()); ++ia) {
    const EigenRect& ra = rects[std::size_t(ia)];
    const Vec2 fc = A * ra.center;
    const Interval fu = sorted(lu * ra.u0, lu * ra.u1), fs = sorted(ls * ra.s0, ls * ra.s1);
    for (int ib = 0; ib < int(rects.size()); ++ib) {
      const EigenRect& rb = rects[std::size_t(ib)];
      const int nx0 = int(std::floor(fc.x)), ny0 = int(std::floor(fc.y));
      for (int nx = nx0 - 5; nx <= nx0 + 5; ++nx)
        for (int ny = ny0 - 5; ny <= ny0 + 5; ++ny) {
          const Vec2 n{double(nx), double(ny)};
          const Vec2 d = f.to_eigen(rb.center + n - fc);
          const Interval bu{d.x + rb.u0, d.x + rb.u1}, bs{d.y + rb.s0, d.y + rb.s1};
          const Interval ou = intersect(fu, bu), os = intersect(fs, bs);
          if (ou.hi - ou.lo <= kEta || os.hi - os.lo <= kEta) continue;
          const bool u_full = fu.lo <= bu.lo + kEta && fu.hi >= bu.hi - kEta;
          const bool s_inside = fs.lo >= bs.lo - kEta && fs.hi <= bs.hi + kEta;
          if (!u_full || !s_inside) return std::nullopt;
          out.push_back({ia, ib, n, d.x, d.y});
        }
    }
  }
  return out;
}

}  // namespace

const Polygon& MarkovPartition::cell(int id) const {
  if (id < 0 || id >= size()) throw ConfigError("markov partition: unknown cell id " + std::to_string(id));
  return cells_[std::size_t(id)];
}

MarkovPartition MarkovPartition::baker(const BakerMap& f, int depth) {
  if (depth < 1) throw ConfigError("baker partition: depth must be at least 1");
  const int k = f.k();
  double count = std::pow(double(k), depth);
  if (count > 1e6) throw CapExceeded("baker partition: cell count above 10^6");
  const int n = int(std::lround(count));
  MarkovPartition p;
  p.depth_ = depth;
  p.baker_ = f;
  p.log_weight_ = -std::log(double(k));
  p.cells_.reserve(std::size_t(n));
  p.succ_.resize(std::size_t(n));
  for (int j = 0; j < n; ++j) {
    const double x0 = double(j) / n, x1 = double(j + 1) / n;
    p.cells_.push_back({{x0, 0}, {x1, 0}, {x1, 1}, {x0, 1}});
    for (int c = 0; c < k; ++c) p.succ_[std::size_t(j)].push_back(int((std::int64_t(k) * j + c) % n));
  }
  // Strip j maps onto k whole strips of the same depth (full x-extent).
  p.certified_ = true;
  return p;
}

MarkovPartition MarkovPartition::toral(const TorusMap& f, int depth, std::size_t max_cells) {
  if (depth < 1) throw ConfigError("toral partition: depth must be at least 1");
  // Candidate half-lengths come from lattice points n = t e_u + sigma e_s:
  // the U endpoint lands on a translate of S when a = |t_n1| and
  // |sigma_n1| <= b, and symmetrically for b.
  std::vector<Vec2> te;
  for (int x = -4; x <= 4; ++x)
    for (int y = -4; y <= 4; ++y)
      if (x || y) te.push_back(f.to_eigen(Vec2{double(x), double(y)}));
  std::vector<std::pair<double, double>> cands;
  for (const auto& n1 : te)
    for (const auto& n2 : te) {
      const double a = std::abs(n1.x), b = std::abs(n2.y);
      if (a < 1e-6 || b < 1e-6 || a > 1.5 || b > 1.5) continue;
      if (std::abs(n1.y) <= b + 1e-12 && std::abs(n2.x) <= a + 1e-12) cands.push_back({a, b});
    }
  std::sort(cands.begin(), cands.end(), [](auto p, auto q) {
    return p.first + p.second < q.first + q.second - 1e-12 ||
           (std::abs(p.first + p.second - q.first - q.second) <= 1e-12 && p.first < q.first);
  });
  cands.erase(std::unique(cands.begin(), cands.end(),
                          [](auto p, auto q) {
                            return std::abs(p.first - q.first) < 1e-12 && std::abs(p.second - q.second) < 1e-12;
                          }),
              cands.end());

  MarkovPartition p;
  p.depth_ = depth;
  p.toral_ = f;
  p.log_weight_ = -std::log(std::abs(f.lambda_u()));
  for (const auto& [a, b] : cands) {
    auto rects = rectangles_for(f, a, b);
    if (rects.empty()) continue;
    auto tr = transitions_for(f, rects);
    if (!tr) continue;
    p.seg_u_ = a;
    p.seg_s_ = b;
    p.base_ = std::move(rects);
    p.trans_ = std::move(*tr);
    p.certified_ = true;
    break;
  }
  if (!p.certified_) throw ConfigError("toral partition: no Markov partition found for this matrix");

  // Depth-d cells: admissible chains of d transitions. The cell realizes
  // the window [-m, d-m] around the middle rectangle, m = d / 2.
  std::vector<std::vector<int>> out_of(p.base_.size());
  for (int t = 0; t < int(p.trans_.size()); ++t) out_of[std::size_t(p.trans_[std::size_t(t)].from)].push_back(t);
  std::vector<std::vector<int>> paths;
  for (int t = 0; t < int(p.trans_.size()); ++t) paths.push_back({t});
  for (int len = 1; len < depth; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& path : paths)
      for (int t : out_of[std::size_t(p.trans_[std::size_t(path.back())].to)]) {
        next.push_back(path);
        next.back().push_back(t);
        if (next.size() > max_cells) throw CapExceeded("toral partition: cell count above cap");
      }
    paths = std::move(next);
  }
  const int m = depth / 2;
  const double lu = f.lambda_u(), ls = f.lambda_s();
  auto rect_at = [&](const std::vector<int>& path, int i) -> const EigenRect& {
    const int r = i < depth ? p.trans_[std::size_t(path[std::size_t(i)])].from
                            : p.trans_[std::size_t(path.back())].to;
    return p.base_[std::size_t(r)];
  };
  double total = 0;
  const double area_factor = std::abs(cross(f.e_u(), f.e_s()));
  for (const auto& path : paths) {
    const EigenRect& last = rect_at(path, depth);
    Interval J{last.u0, last.u1};
    for (int i = depth - 1; i >= m; --i) {
      const auto& t = p.trans_[std::size_t(path[std::size_t(i)])];
      const EigenRect& r = rect_at(path, i);
      J = intersect(sorted((J.lo + t.du) / lu, (J.hi + t.du) / lu), {r.u0, r.u1});
    }
    const EigenRect& first = rect_at(path, 0);
    Interval K{first.s0, first.s1};
    for (int i = 0; i < m; ++i) {
      const auto& t = p.trans_[std::size_t(path[std::size_t(i)])];
      const EigenRect& r = rect_at(path, i + 1);
      K = intersect(sorted(ls * K.lo - t.ds, ls * K.hi - t.ds), {r.s0, r.s1});
    }
    if (J.hi - J.lo <= 1e-14 || K.hi - K.lo <= 1e-14)
      throw ConfigError("toral partition: admissible chain with empty cell");
    const EigenRect& mid = rect_at(path, m);
    const double cu = 0.5 * (J.lo + J.hi), cs = 0.5 * (K.lo + K.hi);
    const EigenRect cell{mid.center + f.from_eigen(cu, cs), J.lo - cu, J.hi - cu, K.lo - cs, K.hi - cs};
    total += (J.hi - J.lo) * (K.hi - K.lo) * area_factor;
    p.cells_.push_back(rect_polygon(f, cell));
  }
  if (std::abs(total - 1.0) > 1e-8) throw ConfigError("toral partition: refined cells do not tile the torus");

  // P -> Q iff Q drops the first transition of P and appends one. The
  // linking rectangle is part of the key so depth 1 works too.
  auto key = [&](const std::vector<int>& path, bool suffix) {
    std::vector<int> k(suffix ? path.begin() + 1 : path.begin(), suffix ? path.end() : path.end() - 1);
    const auto& t0 = p.trans_[std::size_t(path[0])];
    k.push_back(suffix ? t0.to : t0.from);
    return k;
  };
  std::map<std::vector<int>, std::vector<int>> by_prefix;
  for (int id = 0; id < int(paths.size()); ++id) by_prefix[key(paths[std::size_t(id)], false)].push_back(id);
  p.succ_.resize(paths.size());
  for (int id = 0; id < int(paths.size()); ++id) {
    const auto it = by_prefix.find(key(paths[std::size_t(id)], true));
    if (it != by_prefix.end()) p.succ_[std::size_t(id)] = it->second;
  }
  return p;
}

MarkovPartition refine(const MarkovPartition& p, int extra_depth) {
  if (extra_depth < 0) throw ConfigError("refine: extra depth must be nonnegative");
  if (p.is_toral()) return MarkovPartition::toral(*p.torus(), p.depth() + extra_depth);
  return MarkovPartition::baker(*p.baker_map(), p.depth() + extra_depth);
}

SubshiftModel SubshiftModel::from_partition(const MarkovPartition& p) {
  SubshiftModel m;
  m.succ = p.successors();
  m.log_w.assign(std::size_t(p.size()), p.log_weight());
  m.state_to_cell.resize(std::size_t(p.size()));
  std::iota(m.state_to_cell.begin(), m.state_to_cell.end(), 0);
  return m;
}

SubshiftModel SubshiftModel::from_dense(const std::vector<std::vector<int>>& A, double log_w) {
  SubshiftModel m;
  const int n = int(A.size());
  m.succ.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    if (int(A[std::size_t(i)].size()) != n) throw ConfigError("subshift: matrix must be square");
    for (int j = 0; j < n; ++j)
      if (A[std::size_t(i)][std::size_t(j)]) m.succ[std::size_t(i)].push_back(j);
  }
  m.log_w.assign(std::size_t(n), log_w);
  m.state_to_cell.resize(std::size_t(n));
  std::iota(m.state_to_cell.begin(), m.state_to_cell.end(), 0);
  return m;
}

SubshiftModel restrict(const SubshiftModel& m, const std::vector<int>& hole_states) {
  const int n = m.size();
  std::vector<int> remap(std::size_t(n), 0);
  for (int s : hole_states) {
    if (s < 0 || s >= n) throw ConfigError("restrict: state out of range");
    remap[std::size_t(s)] = -1;
  }
  int next = 0;
  for (int i = 0; i < n; ++i)
    if (remap[std::size_t(i)] == 0) remap[std::size_t(i)] = next++;
    else remap[std::size_t(i)] = -1;
  if (next == 0) throw ConfigError("restrict: every state lies in the hole");
  SubshiftModel r;
  r.succ.resize(std::size_t(next));
  r.log_w.resize(std::size_t(next));
  r.state_to_cell.resize(std::size_t(next));
  for (int i = 0; i < n; ++i) {
    const int ri = remap[std::size_t(i)];
    if (ri < 0) continue;
    r.log_w[std::size_t(ri)] = m.log_w[std::size_t(i)];
    r.state_to_cell[std::size_t(ri)] = m.state_to_cell[std::size_t(i)];
    for (int j : m.succ[std::size_t(i)])
      if (remap[std::size_t(j)] >= 0) r.succ[std::size_t(ri)].push_back(remap[std::size_t(j)]);
  }
  return r;
}

// Tarjan's algorithm, iterative.
std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& succ,
                                                 const std::vector<char>& active) {
  const int n = int(succ.size());
  std::vector<int> index(std::size_t(n), -1), low(std::size_t(n), 0);
  std::vector<char> on_stack(std::size_t(n), 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;
  std::vector<std::pair<int, std::size_t>> call;
  for (int root = 0; root < n; ++root) {
    if (!active[std::size_t(root)] || index[std::size_t(root)] >= 0) continue;
    call.push_back({root, 0});
    index[std::size_t(root)] = low[std::size_t(root)] = counter++;
    stack.push_back(root);
    on_stack[std::size_t(root)] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      const auto& out = succ[std::size_t(v)];
      if (pos < out.size()) {
        const int w = out[pos++];
        if (!active[std::size_t(w)]) continue;
        if (index[std::size_t(w)] < 0) {
          index[std::size_t(w)] = low[std::size_t(w)] = counter++;
          stack.push_back(w);
          on_stack[std::size_t(w)] = 1;
          call.push_back({w, 0});
        } else if (on_stack[std::size_t(w)]) {
          low[std::size_t(v)] = std::min(low[std::size_t(v)], index[std::size_t(w)]);
        }
        continue;
      }
      const int vv = v;
      call.pop_back();
      if (!call.empty()) low[std::size_t(call.back().first)] = std::min(low[std::size_t(call.back().first)], low[std::size_t(vv)]);
      if (low[std::size_t(vv)] == index[std::size_t(vv)]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[std::size_t(w)] = 0;
          comp.push_back(w);
        } while (w != vv);
        comps.push_back(std::move(comp));
      }
    }
  }
  return comps;
}

namespace {

bool has_internal_edge(const std::vector<std::vector<int>>& succ, const std::vector<int>& comp,
                       const std::vector<int>& comp_of, int c) {
  if (comp.size() > 1) return true;
  for (int w : succ[std::size_t(comp[0])])
    if (comp_of[std::size_t(w)] == c) return true;
  return false;
}

// Perron root of W + I on one irreducible component (primitive), minus 1.
// Stops when the Collatz-Wielandt bounds meet.
double component_radius(const SubshiftModel& m, const std::vector<int>& comp, const std::vector<int>& comp_of,
                        int c) {
  const std::size_t n = comp.size();
  std::vector<int> local(m.succ.size(), -1);
  for (std::size_t i = 0; i < n; ++i) local[std::size_t(comp[i])] = int(i);
  std::vector<std::vector<int>> adj(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(m.log_w[std::size_t(comp[i])]);
    for (int t : m.succ[std::size_t(comp[i])])
      if (comp_of[std::size_t(t)] == c) adj[i].push_back(local[std::size_t(t)]);
  }
  std::vector<double> x(n, 1.0), y(n);
  double lo = 0, hi = 0;
  for (int it = 0; it < 1'000'000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (int j : adj[i]) s += x[std::size_t(j)];
      y[i] = w[i] * s + x[i];
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0;
    double norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] / x[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      norm = std::max(norm, y[i]);
    }
    if (hi - lo <= 1e-13 * hi) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  return 0.5 * (lo + hi) - 1.0;
}

}  // namespace

double spectral_radius(const SubshiftModel& m) {
  const int n = m.size();
  const std::vector<char> active(std::size_t(n), 1);
  const auto comps = strongly_connected(m.succ, active);
  std::vector<int> comp_of(std::size_t(n), -1);
  for (int c = 0; c < int(comps.size()); ++c)
    for (int v : comps[std::size_t(c)]) comp_of[std::size_t(v)] = c;
  double best = 0.0;
  for (int c = 0; c < int(comps.size()); ++c)
    if (has_internal_edge(m.succ, comps[std::size_t(c)], comp_of, c))
      best = std::max(best, component_radius(m, comps[std::size_t(c)], comp_of, c));
  return best;
}

double spectral_radius(const std::vector<std::vector<int>>& A) {
  return spectral_radius(SubshiftModel::from_dense(A));
}

double pressure(const SubshiftModel& m) {
  const double sp = spectral_radius(m);
  return sp > 0 ? std::log(sp) : kNegInf;
}

namespace {

// Karp's maximum mean cycle on one strongly connected component.
CycleResult karp(const SubshiftModel& m, const std::vector<int>& comp, const std::vector<int>& comp_of, int c) {
  const int n = int(comp.size());
  std::vector<int> local(m.succ.size(), -1);
  for (int i = 0; i < n; ++i) local[std::size_t(comp[std::size_t(i)])] = i;
  std::vector<std::vector<double>> D(std::size_t(n) + 1, std::vector<double>(std::size_t(n), kNegInf));
  std::vector<std::vector<int>> par(std::size_t(n) + 1, std::vector<int>(std::size_t(n), -1));
  D[0][0] = 0.0;
  for (int k = 1; k <= n; ++k)
    for (int i = 0; i < n; ++i) {
      if (D[std::size_t(k - 1)][std::size_t(i)] == kNegInf) continue;
      const int v = comp[std::size_t(i)];
      for (int t : m.succ[std::size_t(v)]) {
        if (comp_of[std::size_t(t)] != c) continue;
        const int j = local[std::size_t(t)];
        const double val = D[std::size_t(k - 1)][std::size_t(i)] + m.log_w[std::size_t(v)];
        if (val > D[std::size_t(k)][std::size_t(j)]) {
          D[std::size_t(k)][std::size_t(j)] = val;
          par[std::size_t(k)][std::size_t(j)] = i;
        }
      }
    }
  double best = kNegInf;
  int arg = -1;
  for (int v = 0; v < n; ++v) {
    if (D[std::size_t(n)][std::size_t(v)] == kNegInf) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k)
      if (D[std::size_t(k)][std::size_t(v)] != kNegInf)
        worst = std::min(worst, (D[std::size_t(n)][std::size_t(v)] - D[std::size_t(k)][std::size_t(v)]) / (n - k));
    if (worst > best) {
      best = worst;
      arg = v;
    }
  }
  CycleResult res;
  if (arg < 0) return res;
  res.value = best;
  // The optimal walk of length n into arg contains a cycle of mean `best`.
  std::vector<int> walk(std::size_t(n) + 1);
  walk[std::size_t(n)] = arg;
  for (int k = n; k > 0; --k) walk[std::size_t(k - 1)] = par[std::size_t(k)][std::size_t(walk[std::size_t(k)])];
  double best_mean = kNegInf;
  std::vector<int> first_seen(std::size_t(n), -1);
  for (int pos = 0; pos <= n; ++pos) {
    const int v = walk[std::size_t(pos)];
    if (first_seen[std::size_t(v)] >= 0) {
      const int start = first_seen[std::size_t(v)];
      double sum = 0;
      for (int q = start; q < pos; ++q) sum += m.log_w[std::size_t(comp[std::size_t(walk[std::size_t(q)])])];
      const double mean = sum / (pos - start);
      if (mean > best_mean) {
        best_mean = mean;
        res.cycle.clear();
        for (int q = start; q < pos; ++q) res.cycle.push_back(comp[std::size_t(walk[std::size_t(q)])]);
      }
    }
    first_seen[std::size_t(v)] = pos;
  }
  return res;
}

// Any closed loop inside component c (all weights equal).
std::vector<int> any_cycle(const SubshiftModel& m, const std::vector<int>& comp, const std::vector<int>& comp_of,
                           int c) {
  const int start = comp[0];
  for (int w : m.succ[std::size_t(start)])
    if (w == start) return {start};
  // Breadth-first search from the successors of start back to start.
  std::map<int, int> parent;
  std::vector<int> queue;
  for (int w : m.succ[std::size_t(start)])
    if (comp_of[std::size_t(w)] == c && !parent.count(w)) {
      parent[w] = start;
      queue.push_back(w);
    }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int v = queue[qi];
    for (int w : m.succ[std::size_t(v)]) {
      if (comp_of[std::size_t(w)] != c) continue;
      if (w == start) {
        std::vector<int> cyc{v};
        while (cyc.back() != start) cyc.push_back(parent[cyc.back()]);
        std::reverse(cyc.begin(), cyc.end());
        return cyc;
      }
      if (!parent.count(w)) {
        parent[w] = v;
        queue.push_back(w);
      }
    }
  }
  return {};
}

}  // namespace

CycleResult max_mean_cycle_pressure(const SubshiftModel& m, const std::vector<int>& excluded) {
  const int n = m.size();
  std::vector<char> active(std::size_t(n), 1);
  for (int s : excluded)
    if (s >= 0 && s < n) active[std::size_t(s)] = 0;
  const auto comps = strongly_connected(m.succ, active);
  std::vector<int> comp_of(std::size_t(n), -1);
  for (int c = 0; c < int(comps.size()); ++c)
    for (int v : comps[std::size_t(c)]) comp_of[std::size_t(v)] = c;
  bool constant = true;
  for (int i = 1; i < n; ++i)
    if (m.log_w[std::size_t(i)] != m.log_w[0]) constant = false;
  CycleResult best;
  for (int c = 0; c < int(comps.size()); ++c) {
    if (!has_internal_edge(m.succ, comps[std::size_t(c)], comp_of, c)) continue;
    if (constant) {
      // Every cycle has mean log_w: the first one found is optimal.
      best.value = m.log_w[0];
      best.cycle = any_cycle(m, comps[std::size_t(c)], comp_of, c);
      return best;
    }
    CycleResult r = karp(m, comps[std::size_t(c)], comp_of, c);
    if (r.value > best.value) best = std::move(r);
  }
  return best;
}

std::vector<int> boundary_touching_states(const MarkovPartition& p, const Hole& h, double eps) {
  if (!(eps > 0)) throw ConfigError("boundary_touching_states: epsilon must be positive");
  std::vector<int> out;
  for (int i = 0; i < p.size(); ++i)
    if (h.boundary_distance(p.cell(i)) <= eps) out.push_back(i);
  return out;
}

std::vector<int> hole_states(const MarkovPartition& p, const Hole& h) {
  std::vector<int> out;
  if (h.empty()) return out;
  for (int i = 0; i < p.size(); ++i) {
    const Polygon& c = p.cell(i);
    if (h.inside_area(c) >= area(c) * (1.0 - 1e-9)) out.push_back(i);
  }
  return out;
}

std::vector<int> touched_states(const MarkovPartition& p, const Hole& h) {
  std::vector<int> out;
  if (h.empty()) return out;
  for (int i = 0; i < p.size(); ++i) {
    const Polygon& c = p.cell(i);
    if (h.inside_area(c) > area(c) * 1e-9) out.push_back(i);
  }
  return out;
}

PressureReport pressure_report(const MarkovPartition& p, const Hole& h, double eps) {
  PressureReport r;
  const SubshiftModel full = SubshiftModel::from_partition(p);
  r.states = full.size();
  const auto inside = hole_states(p, h);
  const auto touched = touched_states(p, h);
  r.aligned = inside.size() == touched.size();
  r.survivor_states = r.states - int(inside.size());
  if (r.survivor_states > 0) {
    r.p_upper = pressure(restrict(full, inside));
    r.sp_restricted = std::exp(r.p_upper - p.log_weight());
  } else {
    r.p_upper = kNegInf;
    r.sp_restricted = 0;
  }
  std::set<int> excl(touched.begin(), touched.end());
  if (!h.empty())
    for (int s : boundary_touching_states(p, h, eps)) excl.insert(s);
  const std::vector<int> excluded(excl.begin(), excl.end());
  r.inner_states = r.states - int(excluded.size());
  const CycleResult cyc = max_mean_cycle_pressure(full, excluded);
  r.p_lower = cyc.value;
  for (int s : cyc.cycle) r.cycle_witness.push_back(full.state_to_cell[std::size_t(s)]);
  r.p_lower_entropy = r.inner_states > 0 ? pressure(restrict(full, excluded)) : kNegInf;
  if (r.aligned) r.rho_reference = r.p_upper;
  return r;
}

}  // namespace escape
