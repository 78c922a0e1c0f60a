#include "escape/mc_escape.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <random>

#include "escape/errors.hpp"
#include "escape/parallel.hpp"

namespace escape {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kReplenishStream = ~std::uint64_t(0);

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t chunk, std::uint64_t step) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(chunk),
                    std::uint32_t(chunk >> 32), std::uint32_t(step), std::uint32_t(step >> 32)};
  return std::mt19937_64(seq);
}

double to_unit(std::uint64_t v) { return double(v >> 11) * 0x1.0p-53; }

}  // namespace

SurvivorSeries run_series(const Map& f, const Hole& hole, std::int64_t N, int n_max,
                          std::uint64_t seed, McMode mode, const McOptions& opt) {
  if (N < 1000) throw ConfigError("run_series: N must be at least 1000");
  if (n_max < 10) throw ConfigError("run_series: n_max must be at least 10");
  const bool local = !opt.initial_region.empty();
  if (local && !std::holds_alternative<TorusMap>(f))
    throw ConfigError("run_series: an initial region needs a toral map");
  if (local && !(area(opt.initial_region) > 0)) throw ConfigError("run_series: initial region has no area");
  Polygon init = opt.initial_region;
  if (local) make_ccw(init);
  const Box region = local ? bounding_box(init) : Box{0, 1, 0, 1};
  const BakerMap* baker = std::get_if<BakerMap>(&f);
  const TorusMap* torus = std::get_if<TorusMap>(&f);
  int m_bits = 0;
  if (baker) {
    if (!std::has_single_bit(unsigned(baker->k())))
      throw ConfigError("run_series: baker Monte Carlo needs k a power of two");
    m_bits = std::countr_zero(unsigned(baker->k()));
  }

  SurvivorSeries s;
  s.n_max = n_max;
  s.N = N;
  s.seed = seed;
  s.mode = mode;
  s.counts.assign(std::size_t(n_max) + 1, 0);
  s.per_step_rate.assign(std::size_t(n_max) + 1, 0.0);
  s.cum_log_measure.assign(std::size_t(n_max) + 1, kNegInf);

  const std::size_t n = std::size_t(N);
  const std::size_t chunk = opt.chunk;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<std::uint64_t> X, Y;
  std::vector<Point2> P;
  if (baker) {
    X.resize(n);
    Y.resize(n);
  } else {
    P.resize(n);
  }
  std::vector<char> alive(n, 1);
  std::vector<std::int64_t> chunk_count(n_chunks);

  auto point_of = [&](std::size_t i) {
    return baker ? Point2{to_unit(X[i]), to_unit(Y[i])} : P[i];
  };

  // Step 0: sample and test.
  parallel_for(n_chunks, [&](std::size_t c) {
    auto rng = stream(seed, c, 0);
    const std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
    std::int64_t cnt = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (baker) {
        X[i] = rng();
        Y[i] = rng();
      } else if (local) {
        Vec2 v;
        do {
          v = {region.x0 + (region.x1 - region.x0) * to_unit(rng()), region.y0 + (region.y1 - region.y0) * to_unit(rng())};
        } while (!inside_or_on(init, v, 0.0));
        P[i] = reduce(v);
      } else {
        P[i] = {to_unit(rng()), to_unit(rng())};
      }
      alive[i] = !hole.contains(point_of(i));
      cnt += alive[i];
    }
    chunk_count[c] = cnt;
  });

  auto total = [&] {
    std::int64_t t = 0;
    for (auto v : chunk_count) t += v;
    return t;
  };

  const Vec2 eu = torus ? torus->e_u() : Vec2{};
  auto replenish = [&](int step) {
    std::vector<std::size_t> live;
    live.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      if (alive[i]) live.push_back(i);
    auto rng = stream(seed, kReplenishStream, std::uint64_t(step));
    std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
    std::uniform_real_distribution<double> jit(-opt.clone_jitter, opt.clone_jitter);
    for (std::size_t i = 0; i < n; ++i) {
      if (alive[i]) continue;
      const std::size_t src = live[pick(rng)];
      if (baker) {
        X[i] = (X[src] & ~std::uint64_t(0xffffffffu)) | (rng() & 0xffffffffu);
        Y[i] = Y[src];
      } else {
        const Vec2 d = eu * jit(rng);
        P[i] = reduce({P[src].x + d.x, P[src].y + d.y});
      }
      alive[i] = 1;
    }
  };

  std::int64_t alive_count = total();
  s.counts[0] = alive_count;
  if (alive_count == 0) throw ImmediateExtinction("no point survives step 0: the hole covers the torus");
  s.per_step_rate[0] = double(alive_count) / double(N);
  s.cum_log_measure[0] = std::log(s.per_step_rate[0]);
  if (mode == McMode::replenished) replenish(0);

  const Mat2 A = torus ? torus->linear() : Mat2{};
  for (int step = 1; step <= n_max; ++step) {
    parallel_for(n_chunks, [&](std::size_t c) {
      const std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
      std::int64_t cnt = 0;
      if (baker) {
        // x, y as 64-bit binary expansions. The shift consumes the leading
        // digit of x; vacated low bits get fresh uniform bits, which is the
        // conditional law of a Lebesgue point below the stored precision.
        auto rng = stream(seed, c, std::uint64_t(step));
        const int m = m_bits;
        const std::uint64_t low_mask = (std::uint64_t(1) << m) - 1;
        for (std::size_t i = lo; i < hi; ++i) {
          const std::uint64_t fresh = rng();  // drawn for every slot: keeps runs coupled
          const std::uint64_t digit = X[i] >> (64 - m);
          X[i] = (X[i] << m) | (fresh & low_mask);
          Y[i] = (Y[i] >> m) | (digit << (64 - m));
          if (!alive[i]) continue;
          if (hole.contains(point_of(i))) alive[i] = 0;
          cnt += alive[i];
        }
      } else {
        for (std::size_t i = lo; i < hi; ++i) {
          if (!alive[i]) continue;
          P[i] = reduce(A * vec(P[i]));
          if (hole.contains(P[i])) alive[i] = 0;
          cnt += alive[i];
        }
      }
      chunk_count[c] = cnt;
    });
    const std::int64_t now = total();
    const std::size_t k = std::size_t(step);
    s.counts[k] = now;
    if (mode == McMode::plain) {
      s.per_step_rate[k] = alive_count > 0 ? double(now) / double(alive_count) : 0.0;
      s.cum_log_measure[k] = now > 0 ? std::log(double(now) / double(N)) : kNegInf;
    } else {
      s.per_step_rate[k] = double(now) / double(N);
      s.cum_log_measure[k] = now > 0 ? s.cum_log_measure[k - 1] + std::log(s.per_step_rate[k]) : kNegInf;
    }
    alive_count = now;
    if (now == 0) {
      s.extinct_step = step;
      break;
    }
    if (mode == McMode::replenished) replenish(step);
  }
  return s;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(m);
  my /= double(m);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

EscapeEstimate estimate(const SurvivorSeries& s, const WindowPolicy& pol) {
  EscapeEstimate e;
  if (s.mode == McMode::replenished && s.extinct_step >= 0) {
    e.rho_hat = e.rho_lower_hat = e.rho_upper_hat = kNegInf;
    e.extinct = true;
    e.n0 = 0;
    e.n1 = s.extinct_step;
    return e;
  }
  const int n0 = pol.drop;
  int n1 = n0 - 1;
  for (int k = n0; k <= s.n_max; ++k) {
    if (s.counts[std::size_t(k)] < pol.min_count) break;
    n1 = k;
  }
  if (n1 - n0 + 1 < pol.min_steps)
    throw HorizonTooDeep("estimate: fewer than " + std::to_string(pol.min_steps) +
                         " usable steps with enough survivors");
  e.n0 = n0;
  e.n1 = n1;
  std::vector<double> xs, ys;
  for (int k = n0; k <= n1; ++k) {
    xs.push_back(k);
    ys.push_back(s.cum_log_measure[std::size_t(k)]);
  }
  e.rho_hat = std::min(0.0, ols_slope(xs, ys)) + 0.0;
  double lo = e.rho_hat, hi = e.rho_hat;
  const int w = std::min<int>(pol.sub_window, int(xs.size()));
  for (std::size_t a = 0; a + std::size_t(w) <= xs.size(); ++a) {
    std::vector<double> sx(xs.begin() + long(a), xs.begin() + long(a) + w);
    std::vector<double> sy(ys.begin() + long(a), ys.begin() + long(a) + w);
    const double sl = std::min(0.0, ols_slope(sx, sy));
    lo = std::min(lo, sl);
    hi = std::max(hi, sl);
  }
  e.rho_lower_hat = lo;
  e.rho_upper_hat = hi;

  std::vector<double> inc;
  for (std::size_t i = 1; i < ys.size(); ++i) inc.push_back(ys[i] - ys[i - 1]);
  std::seed_seq seq{std::uint32_t(pol.bootstrap_seed), std::uint32_t(pol.bootstrap_seed >> 32),
                    std::uint32_t(s.seed), std::uint32_t(s.seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, inc.size() - 1);
  std::vector<double> means;
  for (int b = 0; b < pol.bootstrap; ++b) {
    double acc = 0;
    for (std::size_t i = 0; i < inc.size(); ++i) acc += inc[pick(rng)];
    means.push_back(acc / double(inc.size()));
  }
  double mu = 0;
  for (double v : means) mu += v;
  mu /= double(means.size());
  double var = 0;
  for (double v : means) var += (v - mu) * (v - mu);
  e.std_err = means.size() > 1 ? std::sqrt(var / double(means.size() - 1)) : 0.0;
  return e;
}

}  // namespace escape
