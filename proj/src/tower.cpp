#include "escape/tower.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>

#include "escape/errors.hpp"
#include "escape/parallel.hpp"

namespace escape {

namespace {

constexpr int kNever = std::numeric_limits<int>::max();

int height(const TowerSpec& s, int j) { return std::min(s.branches[std::size_t(j)].R, s.L); }

bool in_hole(const std::set<TowerCell>& h, int level, int branch) { return h.count({level, branch}) > 0; }

std::set<TowerCell> as_set(const TowerHole& h) { return {h.cells.begin(), h.cells.end()}; }

}  // namespace

void TowerSpec::validate() const {
  if (branches.empty()) throw ConfigError("tower: no branches");
  if (L < 1) throw ConfigError("tower: truncation level must be >= 1");
  if (!(theta > 0 && theta < 1) || !(C > 0)) throw ConfigError("tower: need C > 0 and 0 < theta < 1");
  double sum = 0;
  int max_r = 0;
  for (const auto& b : branches) {
    if (!(b.w > 0 && b.w <= 1)) throw ConfigError("tower: branch width outside (0, 1]");
    if (b.R < 1) throw ConfigError("tower: return time must be >= 1");
    sum += b.w;
    max_r = std::max(max_r, b.R);
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("tower: branch widths must sum to 1");
  for (int n = 0; n <= max_r; ++n) {
    double tail = 0;
    for (const auto& b : branches)
      if (b.R > n) tail += b.w;
    if (tail > C * std::pow(theta, n) * (1 + 1e-12)) throw ConfigError("tower: tail bound C theta^n violated");
  }
}

bool TowerSpec::mixing() const {
  int g = 0;
  for (const auto& b : branches) g = std::gcd(g, b.R);
  return g == 1;
}

double TowerSpec::truncation_bound() const { return C * std::pow(theta, L) / (1 - theta); }

TowerSpec geometric_tower(int J, int L) {
  if (J < 2) throw ConfigError("geometric_tower: need at least two branches");
  TowerSpec s;
  double used = 0;
  for (int j = 1; j < J; ++j) {
    s.branches.push_back({std::ldexp(1.0, -j), j});
    used += std::ldexp(1.0, -j);
  }
  s.branches.push_back({1.0 - used, J});
  s.C = 1.0;
  s.theta = 0.5;
  s.L = L;
  return s;
}

int TowerHole::opening_level() const {
  int m = kNever;
  for (const auto& c : cells) m = std::min(m, c.first);
  return m;
}

TowerOperator TowerOperator::build(const TowerSpec& spec, TailClosure closure) {
  spec.validate();
  TowerOperator op;
  op.spec_ = spec;
  op.closure_ = closure;
  op.mixing_ = spec.mixing();
  const int nb = int(spec.branches.size());
  std::size_t total = 0;
  for (int j = 0; j < nb; ++j) total += std::size_t(height(spec, j));
  if (total > 1'000'000) throw CapExceeded("tower: more than 10^6 cells");
  for (int j = 0; j < nb; ++j) {
    op.offset_.push_back(int(op.cells_.size()));
    for (int l = 0; l < height(spec, j); ++l) op.cells_.push_back({l, j});
  }
  op.masked_.assign(op.cells_.size(), 0);
  for (int j = 0; j < nb; ++j) {
    const int top = height(spec, j) - 1;
    for (int l = 0; l < top; ++l) op.edges_.push_back({op.index(l, j), op.index(l + 1, j), 1.0});
    // A truncated column either returns early (reflect) or leaks (absorb).
    const bool truncated = spec.branches[std::size_t(j)].R > spec.L;
    if (truncated && closure == TailClosure::absorb) continue;
    for (int j2 = 0; j2 < nb; ++j2)
      op.edges_.push_back({op.index(top, j), op.index(0, j2), spec.branches[std::size_t(j2)].w});
  }
  return op;
}

int TowerOperator::index(int level, int branch) const {
  if (branch < 0 || branch >= int(spec_.branches.size())) return -1;
  if (level < 0 || level >= height(spec_, branch)) return -1;
  return offset_[std::size_t(branch)] + level;
}

TowerOperator TowerOperator::open(const TowerHole& h) const {
  TowerOperator out = *this;
  for (const auto& [l, j] : h.cells) {
    const int id = index(l, j);
    if (id < 0) throw ConfigError("tower: hole cell outside the truncated tower");
    out.masked_[std::size_t(id)] = 1;
  }
  bool base_left = false;
  for (int j = 0; j < int(spec_.branches.size()); ++j) base_left = base_left || !out.masked_[std::size_t(index(0, j))];
  if (!base_left) throw ImmediateExtinction("tower: hole removes the whole base");
  std::vector<TowerEdge> kept;
  for (const auto& e : out.edges_)
    if (!out.masked_[std::size_t(e.from)] && !out.masked_[std::size_t(e.to)]) kept.push_back(e);
  out.edges_ = std::move(kept);
  out.opening_level_ = std::min(opening_level_, h.opening_level());
  // Mixing of the survivors: gcd over branches whose whole column survives.
  int g = 0;
  for (int j = 0; j < int(spec_.branches.size()); ++j) {
    bool alive = true;
    for (int l = 0; l < height(spec_, j); ++l) alive = alive && !out.masked_[std::size_t(index(l, j))];
    if (alive && (closure_ == TailClosure::reflect || spec_.branches[std::size_t(j)].R <= spec_.L))
      g = std::gcd(g, height(spec_, j));
  }
  out.mixing_ = g == 1;
  return out;
}

TowerSpectrum leading(const TowerOperator& op, int max_iter) {
  const int n = op.size();
  std::vector<double> v(static_cast<std::size_t>(n), 0.0), w;
  int live_base = 0;
  for (int j = 0; j < int(op.spec().branches.size()); ++j) live_base += !op.masked()[std::size_t(op.index(0, j))];
  for (int j = 0; j < int(op.spec().branches.size()); ++j) {
    const int id = op.index(0, j);
    if (!op.masked()[std::size_t(id)]) v[std::size_t(id)] = 1.0 / live_base;
  }
  // Mass evolution under W + I: the shift removes periodicity, and the
  // growth factor of the norm converges to 1 + r.
  TowerSpectrum sp;
  double prev = -1;
  int stable = 0;
  for (int it = 1; it <= max_iter; ++it) {
    w = v;
    for (const auto& e : op.edges()) w[std::size_t(e.to)] += v[std::size_t(e.from)] * e.w;
    double s = 0;
    for (double x : w) s += x;
    const double r = s - 1.0;
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = w[std::size_t(i)] / s;
    sp.iterations = it;
    sp.r = std::max(0.0, r);
    stable = std::abs(r - prev) <= 1e-15 * std::max(1.0, std::abs(r)) ? stable + 1 : 0;
    prev = r;
    if (stable >= 50) {
      sp.converged = true;
      break;
    }
  }
  return sp;
}

double renewal_root(const TowerSpec& spec, const TowerHole& h, TailClosure closure) {
  const auto hs = as_set(h);
  std::vector<std::pair<double, int>> alive;
  for (int j = 0; j < int(spec.branches.size()); ++j) {
    const auto& b = spec.branches[std::size_t(j)];
    if (b.R > spec.L && closure == TailClosure::absorb) continue;
    const int R = std::min(b.R, spec.L);
    bool ok = true;
    for (int l = 0; l < R && ok; ++l) ok = !in_hole(hs, l, j);
    if (ok) alive.push_back({b.w, R});
  }
  if (alive.empty()) return 0.0;
  auto F = [&](double z) {
    double s = 0;
    for (auto [w, R] : alive) s += w * std::pow(z, -R);
    return s;
  };
  // F decreases in z; F(0+) = inf.
  if (F(1.0) <= 1.0) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mid > 0 && F(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  return 1.0;
}

double survival_measure(const TowerSpec& spec, const TowerHole& h, int n, long long max_paths) {
  spec.validate();
  const auto hs = as_set(h);
  const int nb = int(spec.branches.size());
  long long paths = 0;
  // Depth-first over return itineraries: a point enters branch j at time t
  // with mass m and climbs until it returns, dies, or reaches time n.
  double total = 0;
  struct Frame {
    int t;
    double m;
  };
  std::vector<Frame> stack{{0, 1.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    for (int j = 0; j < nb; ++j) {
      if (++paths > max_paths) throw CapExceeded("tower: survival enumeration exceeds path cap");
      const auto& b = spec.branches[std::size_t(j)];
      const double m = f.m * b.w;
      bool dead = false;
      int l = 0;
      for (; l < b.R && f.t + l <= n; ++l)
        if (in_hole(hs, l, j)) {
          dead = true;
          break;
        }
      if (dead) continue;
      if (f.t + b.R > n)
        total += m;
      else
        stack.push_back({f.t + b.R, m});
    }
  }
  return total;
}

int agreement_depth(const TowerSpec& spec, const TowerHole& h1, const TowerHole& h2) {
  const auto a = as_set(h1), b = as_set(h2);
  std::set<TowerCell> diff, common;
  for (const auto& c : a) (b.count(c) ? common : diff).insert(c);
  for (const auto& c : b)
    if (!a.count(c)) diff.insert(c);
  if (diff.empty()) return kNever;
  const TowerOperator op = TowerOperator::build(spec, TailClosure::reflect);
  // Breadth-first from every base cell at time 0 through cells outside both holes.
  std::vector<int> dist(std::size_t(op.size()), -1);
  std::vector<std::vector<int>> succ(std::size_t(op.size()));
  for (const auto& e : op.edges()) succ[std::size_t(e.from)].push_back(e.to);
  std::deque<int> q;
  for (int j = 0; j < int(spec.branches.size()); ++j) {
    const int id = op.index(0, j);
    dist[std::size_t(id)] = 0;
    q.push_back(id);
  }
  while (!q.empty()) {
    const int c = q.front();
    q.pop_front();
    const TowerCell cell = op.cells()[std::size_t(c)];
    if (diff.count(cell)) return dist[std::size_t(c)];
    if (common.count(cell)) continue;
    for (int t : succ[std::size_t(c)])
      if (dist[std::size_t(t)] < 0) {
        dist[std::size_t(t)] = dist[std::size_t(c)] + 1;
        q.push_back(t);
      }
  }
  return kNever;
}

ClosenessReport eigenvalue_closeness_experiment(const TowerSpec& spec,
                                                const std::vector<std::pair<TowerHole, TowerHole>>& pairs) {
  const TowerOperator base = TowerOperator::build(spec, TailClosure::absorb);
  ClosenessReport rep;
  rep.rows.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    ClosenessRow& row = rep.rows[i];
    row.pair_id = int(i);
    row.depth = agreement_depth(spec, pairs[i].first, pairs[i].second);
    try {
      const auto s1 = leading(base.open(pairs[i].first));
      const auto s2 = leading(base.open(pairs[i].second));
      row.r1 = s1.r;
      row.r2 = s2.r;
      row.abs_diff = std::abs(s1.r - s2.r);
      if (!s1.converged || !s2.converged) row.error = "power iteration did not converge (gap loss)";
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  std::vector<double> x, y;
  for (const auto& r : rep.rows)
    if (r.error.empty() && r.depth != kNever && r.abs_diff > 0) {
      x.push_back(r.depth);
      y.push_back(std::log(r.abs_diff));
    }
  rep.fitted = int(x.size());
  if (x.size() >= 2) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
      syy += (y[i] - my) * (y[i] - my);
    }
    rep.slope = sxx > 0 ? sxy / sxx : 0;
    rep.intercept = my - rep.slope * mx;
    rep.r2 = sxx > 0 && syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  }
  return rep;
}

std::pair<TowerHole, TowerHole> depth_pair(const TowerSpec& spec, const TowerHole& common, int n) {
  TowerHole h2 = common;
  for (int j = 0; j < int(spec.branches.size()); ++j)
    if (n < std::min(spec.branches[std::size_t(j)].R, spec.L)) h2.cells.push_back({n, j});
  return {common, h2};
}

}  // namespace escape
