#include "escape/survivor.hpp"

#include <algorithm>
#include <cmath>

#include "escape/errors.hpp"
#include "escape/parallel.hpp"

namespace escape {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool certified_inside(const Hole& h, const Polygon& p, bool closed) {
  const Vec2 g = centroid(p);
  if (!h.contains(reduce(g))) return false;
  // A connected set that misses the boundary and has a point in H lies in H.
  if (closed) return !h.boundary_meets(p);
  return h.inside_area(p) >= area(p) * (1.0 - 1e-12);
}

Polygon grid_cell(int k, int c) {
  const double w = 1.0 / k;
  const double x0 = (c % k) * w, y0 = (c / k) * w;
  return {{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + w}, {x0, y0 + w}};
}

// f^i(cell) when every step stays inside a single affine piece; empty when
// the iterate splits (the test is then skipped, which keeps soundness).
Polygon baker_iterate(const Map& f, Polygon p, int i) {
  const auto pieces = i >= 0 ? affine_pieces(f) : inverse_affine_pieces(f);
  for (int s = 0; s < std::abs(i); ++s) {
    const AffinePiece* hit = nullptr;
    for (const auto& pc : pieces) {
      bool all = true;
      for (auto v : p) all = all && inside_or_on(pc.domain, v, 1e-14);
      if (all) {
        hit = &pc;
        break;
      }
    }
    if (!hit) return {};
    p = transform(p, hit->linear, hit->shift);
  }
  return p;
}

class Trimmer {
 public:
  Trimmer(const Map& f, const UlamOperator& grid, const Hole& h, const SurvivorOptions& opt)
      : f_(f), grid_(grid), h_(h), opt_(opt), PT_(grid.P.transpose()) {
    if (grid.is_masked()) throw ConfigError("survivor: grid operator must be unmasked");
    if (grid.k > 2048) throw CapExceeded("survivor: resolution above 2048");
    a_.k = grid.k;
    a_.retained.assign(std::size_t(grid.k) * std::size_t(grid.k), 1);
    if (auto t = std::get_if<TorusMap>(&f)) {
      torus_ = true;
      lambda_ = std::abs(t->lambda_u());
      fwd_ = back_ = Mat2{};
    }
    exclude_iterate(0);
    trim();
    a_.count_history.push_back(count());
  }

  // Extend the horizon by one: test iterates +n and -n.
  void step() {
    const int n = a_.n + 1;
    if (torus_) {
      const auto* t = std::get_if<TorusMap>(&f_);
      fwd_ = t->linear() * fwd_;
      back_ = t->inverse_linear() * back_;
    }
    const int prev = count();
    exclude_iterate(n);
    exclude_iterate(-n);
    trim();
    a_.n = n;
    const int now = count();
    a_.count_history.push_back(now);
    a_.stabilized = now == 0 || double(prev - now) < opt_.stable_change * prev;
  }

  // Images longer than this never fit in a test we can certify cheaply.
  bool saturated() const {
    if (count() == 0) return true;
    if (!torus_) return false;
    return std::pow(lambda_, a_.n + 1) * std::sqrt(2.0) / a_.k > opt_.max_image_length;
  }

  int count() const {
    int c = 0;
    for (char r : a_.retained) c += r;
    return c;
  }
  SurvivorApprox& result() { return a_; }

 private:
  void exclude_iterate(int i) {
    if (h_.empty()) return;
    const int k = a_.k;
    const double w = 1.0 / k;
    if (torus_ && i != 0 && std::pow(lambda_, std::abs(i)) * std::sqrt(2.0) * w > opt_.max_image_length)
      return;
    const Mat2 M = i >= 0 ? fwd_ : back_;
    parallel_for(std::size_t(k), [&](std::size_t row) {
      const int iy = int(row);
      for (int ix = 0; ix < k; ++ix) {
        const std::size_t id = std::size_t(iy) * std::size_t(k) + std::size_t(ix);
        if (!a_.retained[id]) continue;
        const Polygon cell = grid_cell(k, int(id));
        Polygon img;
        if (i == 0) {
          const int q = h_.quick_box_state({ix * w, (ix + 1) * w, iy * w, (iy + 1) * w});
          if (q == 0) continue;
          if (q == 1 && opt_.closed_cells) {
            a_.retained[id] = 0;
            continue;
          }
          img = cell;
        } else if (torus_) {
          img = transform(cell, M);
          const Vec2 g = centroid(img);
          img = translate(img, {-std::floor(g.x), -std::floor(g.y)});
        } else {
          img = baker_iterate(f_, cell, i);
          if (img.empty()) continue;
        }
        if (certified_inside(h_, img, opt_.closed_cells)) a_.retained[id] = 0;
      }
    });
  }

  // Keep only cells with a retained forward and backward Ulam neighbour,
  // until nothing changes. Worklist over neighbour counts: O(nnz) total.
  void trim() {
    const Csr& P = grid_.P;
    const int n = P.n;
    auto& r = a_.retained;
    std::vector<int> fc(std::size_t(n), 0), bc(std::size_t(n), 0), work;
    for (int c = 0; c < n; ++c) {
      if (!r[std::size_t(c)]) continue;
      for (auto e = P.ptr[std::size_t(c)]; e < P.ptr[std::size_t(c) + 1]; ++e)
        fc[std::size_t(c)] += r[std::size_t(P.col[std::size_t(e)])];
      for (auto e = PT_.ptr[std::size_t(c)]; e < PT_.ptr[std::size_t(c) + 1]; ++e)
        bc[std::size_t(c)] += r[std::size_t(PT_.col[std::size_t(e)])];
      if (fc[std::size_t(c)] == 0 || bc[std::size_t(c)] == 0) work.push_back(c);
    }
    while (!work.empty()) {
      const int c = work.back();
      work.pop_back();
      if (!r[std::size_t(c)]) continue;
      r[std::size_t(c)] = 0;
      for (auto e = P.ptr[std::size_t(c)]; e < P.ptr[std::size_t(c) + 1]; ++e) {
        const int j = P.col[std::size_t(e)];
        if (r[std::size_t(j)] && --bc[std::size_t(j)] == 0) work.push_back(j);
      }
      for (auto e = PT_.ptr[std::size_t(c)]; e < PT_.ptr[std::size_t(c) + 1]; ++e) {
        const int i = PT_.col[std::size_t(e)];
        if (r[std::size_t(i)] && --fc[std::size_t(i)] == 0) work.push_back(i);
      }
    }
  }

  const Map& f_;
  const UlamOperator& grid_;
  const Hole& h_;
  SurvivorOptions opt_;
  Csr PT_;
  SurvivorApprox a_;
  bool torus_ = false;
  double lambda_ = 1.0;
  Mat2 fwd_, back_;
};

}  // namespace

SurvivorApprox compute(const Map& f, const UlamOperator& grid, const Hole& h, int n, const SurvivorOptions& opt) {
  if (n < 0 || n > 60) throw ConfigError("survivor: horizon must lie in [0, 60]");
  Trimmer tr(f, grid, h, opt);
  while (tr.result().n < n) {
    if (tr.saturated()) {
      // Nothing further can be excluded: later horizons repeat this one.
      auto& a = tr.result();
      a.stabilized = true;
      while (a.n < n) {
        a.count_history.push_back(a.count_history.back());
        ++a.n;
      }
      break;
    }
    tr.step();
  }
  return tr.result();
}

SurvivorApprox compute(const Map& f, const Hole& h, int k, int n, const SurvivorOptions& opt) {
  if (k > 2048) throw CapExceeded("survivor: resolution above 2048");
  return compute(f, build(f, k), h, n, opt);
}

SurvivorApprox compute_auto(const Map& f, const UlamOperator& grid, const Hole& h, const SurvivorOptions& opt) {
  Trimmer tr(f, grid, h, opt);
  while (tr.result().n < 60) {
    if (tr.saturated()) {
      tr.result().stabilized = true;
      break;
    }
    tr.step();
    if (tr.result().stabilized) break;
  }
  return tr.result();
}

double boundary_gap(const SurvivorApprox& a, const Hole& h) {
  const int k = a.k;
  const double w = 1.0 / k;
  std::vector<int> ids;
  for (int c = 0; c < int(a.retained.size()); ++c)
    if (a.retained[std::size_t(c)]) ids.push_back(c);
  if (ids.empty() || h.boundary().empty()) return kInf;
  std::vector<double> dc(ids.size());
  parallel_for(ids.size(), [&](std::size_t i) {
    const int c = ids[i];
    dc[i] = h.boundary_distance(Point2{(c % k + 0.5) * w, (c / k + 0.5) * w});
  });
  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return dc[x] < dc[y]; });
  // A cell lies within half a diagonal of its centre.
  const double half_diag = w * std::sqrt(0.5);
  double best = kInf;
  for (std::size_t i : order) {
    if (dc[i] - half_diag >= best) break;
    const int c = ids[i];
    const double x0 = (c % k) * w, y0 = (c / k) * w;
    const Polygon cell{{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + w}, {x0, y0 + w}};
    best = std::min(best, h.boundary_distance(cell));
    if (best == 0.0) break;
  }
  return best;
}

std::string to_string(GapFlag g) {
  switch (g) {
    case GapFlag::gap:
      return "GAP";
    case GapFlag::touch:
      return "TOUCH";
    default:
      return "UNDECIDED";
  }
}

GapFlag classify(const SurvivorApprox& a, double gap) {
  const double w = a.cell_width();
  if (gap >= 2 * w && a.stabilized) return GapFlag::gap;
  if (gap < w) return GapFlag::touch;
  return GapFlag::undecided;
}

FamilyClassification classify_family(const Map& f, const HoleFamily& fam, const std::vector<double>& ts, int k,
                                     int n, const SurvivorOptions& opt) {
  FamilyClassification out;
  const UlamOperator grid = build(f, k);
  int gaps = 0;
  for (double t : ts) {
    const Hole h = fam.at(t);
    const SurvivorApprox a = n > 0 ? compute(f, grid, h, n, opt) : compute_auto(f, grid, h, opt);
    const double g = boundary_gap(a, h);
    const GapFlag fl = classify(a, g);
    out.t.push_back(t);
    out.gap.push_back(g);
    out.flag.push_back(fl);
    gaps += fl == GapFlag::gap;
  }
  out.gap_fraction = ts.empty() ? 0.0 : double(gaps) / double(ts.size());
  return out;
}

}  // namespace escape
