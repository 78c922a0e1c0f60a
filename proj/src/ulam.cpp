#include "escape/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "escape/errors.hpp"
#include "escape/parallel.hpp"
#include "escape/symbolic.hpp"

namespace escape {

Csr Csr::transpose() const {
  Csr t;
  t.n = n;
  t.ptr.assign(std::size_t(n) + 1, 0);
  for (int c : col) ++t.ptr[std::size_t(c) + 1];
  for (int i = 0; i < n; ++i) t.ptr[std::size_t(i) + 1] += t.ptr[std::size_t(i)];
  t.col.resize(col.size());
  t.val.resize(val.size());
  std::vector<std::int64_t> pos(t.ptr.begin(), t.ptr.end() - 1);
  for (int i = 0; i < n; ++i)
    for (auto e = ptr[std::size_t(i)]; e < ptr[std::size_t(i) + 1]; ++e) {
      const auto p = pos[std::size_t(col[std::size_t(e)])]++;
      t.col[std::size_t(p)] = i;
      t.val[std::size_t(p)] = val[std::size_t(e)];
    }
  return t;
}

int UlamOperator::masked_count() const {
  int c = 0;
  for (char m : masked) c += m;
  return c;
}

double UlamOperator::row_sum(int i) const {
  double s = 0;
  for (auto e = P.ptr[std::size_t(i)]; e < P.ptr[std::size_t(i) + 1]; ++e) s += P.val[std::size_t(e)];
  return s;
}

Polygon UlamOperator::cell_polygon(int id) const {
  const double h = 1.0 / k;
  const double x0 = (id % k) * h, y0 = (id / k) * h;
  return {{x0, y0}, {x0 + h, y0}, {x0 + h, y0 + h}, {x0, y0 + h}};
}

namespace {

struct Entry {
  int col;
  double w;
};

// Spread the image polygon over grid cells; weights are area * k^2.
void distribute(const Polygon& img, int k, std::vector<Entry>& out) {
  const Box b = bounding_box(img);
  const double h = 1.0 / k;
  const int cx0 = int(std::floor(b.x0 * k)), cx1 = int(std::ceil(b.x1 * k)) - 1;
  const int cy0 = int(std::floor(b.y0 * k)), cy1 = int(std::ceil(b.y1 * k)) - 1;
  const double kk = double(k) * double(k);
  for (int cx = cx0; cx <= cx1; ++cx) {
    Polygon slab = clip_halfplane(img, {-1, 0}, -cx * h);
    slab = clip_halfplane(slab, {1, 0}, (cx + 1) * h);
    if (slab.empty()) continue;
    const Box sb = bounding_box(slab);
    const int ry0 = std::max(cy0, int(std::floor(sb.y0 * k))), ry1 = std::min(cy1, int(std::ceil(sb.y1 * k)) - 1);
    for (int cy = ry0; cy <= ry1; ++cy) {
      Polygon piece = clip_halfplane(slab, {0, -1}, -cy * h);
      piece = clip_halfplane(piece, {0, 1}, (cy + 1) * h);
      if (piece.empty()) continue;
      const double w = area(piece) * kk;
      if (w <= 1e-15) continue;
      const int tx = ((cx % k) + k) % k, ty = ((cy % k) + k) % k;
      out.push_back({ty * k + tx, w});
    }
  }
}

void merge_row(std::vector<Entry>& row) {
  std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
  std::size_t m = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (m > 0 && row[m - 1].col == row[i].col)
      row[m - 1].w += row[i].w;
    else
      row[m++] = row[i];
  }
  row.resize(m);
}

}  // namespace

UlamOperator build(const Map& f, int k, BuildMode mode, int samples_per_box, std::size_t max_nnz) {
  if (k < 4 || k > 4096) throw CapExceeded("ulam build: k must lie in [4, 4096]");
  double spread = 2.0;
  if (auto t = std::get_if<TorusMap>(&f)) spread = std::abs(t->lambda_u()) + 3.0;
  if (auto b = std::get_if<BakerMap>(&f)) spread = b->k() + 1.0;
  const double est = double(k) * double(k) * spread * 3.0;
  if (est > double(max_nnz)) throw CapExceeded("ulam build: estimated nonzeros exceed the memory cap");
  if (mode == BuildMode::sampled && samples_per_box < 1)
    throw ConfigError("ulam build: sampled mode needs samples_per_box >= 1");

  UlamOperator op;
  op.k = k;
  op.mode = mode;
  op.samples_per_box = mode == BuildMode::sampled ? samples_per_box : 0;
  const int n = k * k;
  const auto pieces = affine_pieces(f);
  const double h = 1.0 / k;

  // Rows are built in blocks, then concatenated in block order.
  const int block = 4096;
  const int n_blocks = (n + block - 1) / block;
  std::vector<std::vector<int>> bcol{std::size_t(n_blocks)};
  std::vector<std::vector<double>> bval{std::size_t(n_blocks)};
  std::vector<std::vector<std::int64_t>> blen{std::size_t(n_blocks)};
  parallel_for(std::size_t(n_blocks), [&](std::size_t b) {
    std::vector<Entry> row;
    const int lo = int(b) * block, hi = std::min(n, lo + block);
    for (int i = lo; i < hi; ++i) {
      row.clear();
      const int ix = i % k, iy = i / k;
      if (mode == BuildMode::exact) {
        const Polygon cell{{ix * h, iy * h}, {(ix + 1) * h, iy * h}, {(ix + 1) * h, (iy + 1) * h},
                           {ix * h, (iy + 1) * h}};
        for (const auto& pc : pieces) {
          const Polygon part = clip_convex(cell, pc.domain);
          if (part.empty() || area(part) <= 1e-300) continue;
          distribute(transform(part, pc.linear, pc.shift), k, row);
        }
      } else {
        const int s = samples_per_box;
        const double w = 1.0 / (double(s) * s);
        for (int a = 0; a < s; ++a)
          for (int c = 0; c < s; ++c) {
            const Point2 p{(ix + (a + 0.5) / s) * h, (iy + (c + 0.5) / s) * h};
            const Point2 q = apply(f, p);
            const int tx = std::min(k - 1, int(q.x * k)), ty = std::min(k - 1, int(q.y * k));
            row.push_back({ty * k + tx, w});
          }
      }
      merge_row(row);
      for (const auto& e : row) {
        bcol[b].push_back(e.col);
        bval[b].push_back(e.w);
      }
      blen[b].push_back(std::int64_t(row.size()));
    }
  });
  op.P.n = n;
  op.P.ptr.reserve(std::size_t(n) + 1);
  op.P.ptr.push_back(0);
  std::size_t total = 0;
  for (const auto& v : bval) total += v.size();
  if (total > max_nnz) throw CapExceeded("ulam build: nonzeros exceed the memory cap");
  op.P.col.reserve(total);
  op.P.val.reserve(total);
  for (int b = 0; b < n_blocks; ++b) {
    for (auto len : blen[std::size_t(b)]) op.P.ptr.push_back(op.P.ptr.back() + len);
    op.P.col.insert(op.P.col.end(), bcol[std::size_t(b)].begin(), bcol[std::size_t(b)].end());
    op.P.val.insert(op.P.val.end(), bval[std::size_t(b)].begin(), bval[std::size_t(b)].end());
  }
  return op;
}

std::vector<char> hole_cells(int k, const Hole& h, CellRule rule) {
  const int n = k * k;
  std::vector<char> in(std::size_t(n), 0);
  if (h.empty()) return in;
  const double hh = 1.0 / k;
  const double cell_area = hh * hh;
  parallel_for(std::size_t(k), [&](std::size_t row) {
    const int iy = int(row);
    for (int ix = 0; ix < k; ++ix) {
      const std::size_t id = std::size_t(iy) * std::size_t(k) + std::size_t(ix);
      if (rule == CellRule::majority) {
        in[id] = h.contains({(ix + 0.5) * hh, (iy + 0.5) * hh});
      } else {
        const Box b{ix * hh, (ix + 1) * hh, iy * hh, (iy + 1) * hh};
        const int q = h.quick_box_state(b);
        if (q >= 0) {
          in[id] = char(q);
          continue;
        }
        const Polygon cell{{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}};
        // Connected and missing the boundary: inside iff the centre is. The
        // area sum over seamed pieces carries ~1e-12 relative roundoff.
        if (!h.boundary_meets(cell))
          in[id] = h.contains({0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1)});
        else
          in[id] = h.inside_area(cell) >= cell_area * (1.0 - 1e-9);
      }
    }
  });
  return in;
}

UlamOperator mask_cells(const UlamOperator& op, const std::vector<char>& cells) {
  if (op.is_masked()) throw ConfigError("mask: operator is already masked");
  UlamOperator out;
  out.k = op.k;
  out.mode = op.mode;
  out.samples_per_box = op.samples_per_box;
  out.masked = cells;
  int live = 0;
  for (char c : cells) live += !c;
  if (live == 0) throw ImmediateExtinction("mask: every cell lies in the hole");
  const int n = op.P.n;
  out.P.n = n;
  out.P.ptr.reserve(std::size_t(n) + 1);
  out.P.ptr.push_back(0);
  out.P.col.reserve(op.P.nnz());
  out.P.val.reserve(op.P.nnz());
  for (int i = 0; i < n; ++i) {
    if (!cells[std::size_t(i)])
      for (auto e = op.P.ptr[std::size_t(i)]; e < op.P.ptr[std::size_t(i) + 1]; ++e) {
        const int j = op.P.col[std::size_t(e)];
        if (cells[std::size_t(j)]) continue;
        out.P.col.push_back(j);
        out.P.val.push_back(op.P.val[std::size_t(e)]);
      }
    out.P.ptr.push_back(std::int64_t(out.P.col.size()));
  }
  return out;
}

UlamOperator mask(const UlamOperator& op, const Hole& h, CellRule rule) {
  return mask_cells(op, hole_cells(op.k, h, rule));
}

namespace {

// w = v P computed as a gather over columns (rows of P^T): each output
// entry sums in a fixed order, so the result does not depend on threads.
void left_mul(const Csr& PT, const std::vector<double>& v, std::vector<double>& w) {
  const int n = PT.n;
  const int block = 8192;
  const int nb = (n + block - 1) / block;
  parallel_for(std::size_t(nb), [&](std::size_t b) {
    const int lo = int(b) * block, hi = std::min(n, lo + block);
    for (int j = lo; j < hi; ++j) {
      double s = 0;
      for (auto e = PT.ptr[std::size_t(j)]; e < PT.ptr[std::size_t(j) + 1]; ++e)
        s += v[std::size_t(PT.col[std::size_t(e)])] * PT.val[std::size_t(e)];
      w[std::size_t(j)] = s;
    }
  });
}

double l1(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

namespace {

struct BlockRoot {
  double root = 0.0;        // NaN if some block failed to certify
  std::vector<int> source;  // an r-block from which no other r-block is reachable
};

// Perron roots of the strongly connected blocks of the live submatrix, each
// iterated as P_C + I (primitive) until the Collatz-Wielandt bounds meet.
BlockRoot block_roots(const Csr& P, const std::vector<char>& live, int max_iter) {
  const int n = P.n;
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (!live[std::size_t(i)]) continue;
    for (auto e = P.ptr[std::size_t(i)]; e < P.ptr[std::size_t(i) + 1]; ++e)
      if (live[std::size_t(P.col[std::size_t(e)])] && P.val[std::size_t(e)] > 0)
        succ[std::size_t(i)].push_back(P.col[std::size_t(e)]);
  }
  const auto comps = strongly_connected(succ, live);
  const int nc = int(comps.size());
  std::vector<int> comp_of(std::size_t(n), -1), local(std::size_t(n), -1);
  for (int c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < comps[std::size_t(c)].size(); ++i) {
      comp_of[std::size_t(comps[std::size_t(c)][i])] = c;
      local[std::size_t(comps[std::size_t(c)][i])] = int(i);
    }
  BlockRoot out;
  std::vector<double> root(std::size_t(nc), 0.0);
  for (int c = 0; c < nc; ++c) {
    const auto& comp = comps[std::size_t(c)];
    const std::size_t m = comp.size();
    bool internal = m > 1;
    for (int t : succ[std::size_t(comp[0])]) internal = internal || comp_of[std::size_t(t)] == c;
    if (!internal) continue;
    std::vector<double> x(m, 1.0), y(m);
    double lo = 0, hi = 0;
    bool ok = false;
    for (int it = 0; it < max_iter && !ok; ++it) {
      for (std::size_t a = 0; a < m; ++a) {
        const int i = comp[a];
        double s = x[a];
        for (auto e = P.ptr[std::size_t(i)]; e < P.ptr[std::size_t(i) + 1]; ++e) {
          const int j = P.col[std::size_t(e)];
          if (comp_of[std::size_t(j)] == c) s += P.val[std::size_t(e)] * x[std::size_t(local[std::size_t(j)])];
        }
        y[a] = s;
      }
      lo = std::numeric_limits<double>::infinity();
      hi = 0;
      double norm = 0;
      for (std::size_t a = 0; a < m; ++a) {
        lo = std::min(lo, y[a] / x[a]);
        hi = std::max(hi, y[a] / x[a]);
        norm = std::max(norm, y[a]);
      }
      ok = hi - lo <= 1e-14 * hi;
      for (std::size_t a = 0; a < m; ++a) x[a] = y[a] / norm;
    }
    if (!ok) {
      out.root = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    root[std::size_t(c)] = 0.5 * (lo + hi) - 1.0;
    out.root = std::max(out.root, root[std::size_t(c)]);
  }
  // Tarjan emits components in reverse topological order, so the first
  // top block met is downstream of every other top block it can reach.
  for (int c = 0; c < nc; ++c)
    if (root[std::size_t(c)] >= out.root * (1 - 1e-12)) {
      out.source = comps[std::size_t(c)];
      break;
    }
  return out;
}

}  // namespace

SpectralResult leading(const UlamOperator& op, const LeadingOptions& opt) {
  const int n = op.P.n;
  const Csr PT = op.P.transpose();
  std::vector<char> live(std::size_t(n), 1);
  if (op.is_masked())
    for (int i = 0; i < n; ++i) live[std::size_t(i)] = !op.masked[std::size_t(i)];
  bool any = false;
  for (int i = 0; i < n; ++i)
    if (live[std::size_t(i)] && op.P.ptr[std::size_t(i) + 1] > op.P.ptr[std::size_t(i)]) any = true;
  if (!any) throw ConfigError("leading: no unmasked cell with a nonzero row");

  std::vector<double> v(std::size_t(n), 0.0), w(std::size_t(n), 0.0);
  if (opt.initial && opt.initial->size() == std::size_t(n)) {
    for (int i = 0; i < n; ++i)
      v[std::size_t(i)] = live[std::size_t(i)] ? std::max(0.0, (*opt.initial)[std::size_t(i)]) : 0.0;
  }
  double s0 = l1(v);
  if (!(s0 > 0)) {
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = live[std::size_t(i)] ? 1.0 : 0.0;
    s0 = l1(v);
  }
  // A little uniform mass keeps every live cell reachable from a warm start.
  if (opt.initial) {
    int nl = 0;
    for (char c : live) nl += c;
    for (int i = 0; i < n; ++i)
      if (live[std::size_t(i)]) v[std::size_t(i)] = v[std::size_t(i)] / s0 * (1 - 1e-9) + 1e-9 / nl;
    s0 = l1(v);
  }
  for (auto& x : v) x /= s0;

  SpectralResult sr;
  double r_prev = -1.0, sigma = 0.0;
  int stable = 0;
  bool restarted = false;
  std::vector<double> res_hist;
  for (int it = 1; it <= opt.max_iter; ++it) {
    left_mul(PT, v, w);
    const double r = l1(w);
    sr.iterations = it;
    if (r == 0.0) {
      sr.r_lead = 0.0;
      sr.qsd.assign(std::size_t(n), 0.0);
      sr.residual = 0.0;
      sr.converged = true;
      sr.gap_proxy = 0.0;
      return sr;
    }
    double res = 0;
    for (int i = 0; i < n; ++i) res += std::abs(w[std::size_t(i)] - r * v[std::size_t(i)]);
    res_hist.push_back(res);
    stable = std::abs(r - r_prev) < opt.tol ? stable + 1 : 0;
    r_prev = r;
    sr.r_lead = r;
    sr.residual = res;
    if (stable >= opt.stable_iters && res <= opt.residual_tol) {
      sr.converged = true;
      break;
    }
    if (it == opt.shift_after) sigma = 0.5;  // breaks periodic oscillation
    if (it == 2 * opt.shift_after && !restarted) {
      // Still stalled: typically a chain of blocks sharing the top root,
      // where plain iteration only converges like 1/n. Restart from the
      // most downstream top block, whose closure has a simple top root.
      const BlockRoot br = block_roots(op.P, live, opt.max_iter);
      if (std::isfinite(br.root) && !br.source.empty()) {
        restarted = true;
        sr.blockwise = true;
        std::fill(v.begin(), v.end(), 0.0);
        for (int c : br.source) v[std::size_t(c)] = 1.0 / double(br.source.size());
        res_hist.clear();
        stable = 0;
        r_prev = -1.0;
        continue;
      }
    }
    const double norm_w = r + sigma;
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = (w[std::size_t(i)] + sigma * v[std::size_t(i)]) / norm_w;
  }
  sr.qsd = v;
  // Contraction factor of the residual approximates |second eigenvalue| / r.
  if (res_hist.size() >= 3) {
    const std::size_t m = std::min<std::size_t>(10, res_hist.size() - 1);
    double acc = 0;
    int cnt = 0;
    for (std::size_t i = res_hist.size() - m; i < res_hist.size(); ++i)
      if (res_hist[i - 1] > 1e-300 && res_hist[i] > 1e-300) {
        acc += std::log(res_hist[i] / res_hist[i - 1]);
        ++cnt;
      }
    double ratio = cnt ? std::exp(acc / cnt) : 0.0;
    if (sigma > 0) ratio = std::abs(ratio * (sr.r_lead + sigma) - sigma) / sr.r_lead;
    sr.gap_proxy = std::min(1.0, ratio);
  }
  if (sr.converged) sr.residual = qsd_residual(op, sr);
  if (!sr.converged && opt.throw_on_failure)
    throw NonConvergence("leading: power iteration did not converge (r = " + std::to_string(sr.r_lead) +
                         ", residual = " + std::to_string(sr.residual) + ")");
  return sr;
}

double qsd_residual(const UlamOperator& op, const SpectralResult& sr) {
  const int n = op.P.n;
  std::vector<double> w(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double vi = sr.qsd[std::size_t(i)];
    if (vi == 0) continue;
    for (auto e = op.P.ptr[std::size_t(i)]; e < op.P.ptr[std::size_t(i) + 1]; ++e)
      w[std::size_t(op.P.col[std::size_t(e)])] += vi * op.P.val[std::size_t(e)];
  }
  double res = 0;
  for (int i = 0; i < n; ++i) res += std::abs(w[std::size_t(i)] - sr.r_lead * sr.qsd[std::size_t(i)]);
  return res;
}

double escape_rate(const SpectralResult& sr) {
  return sr.r_lead > 0 ? std::log(sr.r_lead) : -std::numeric_limits<double>::infinity();
}

}  // namespace escape
