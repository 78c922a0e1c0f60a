#include "escape/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "escape/errors.hpp"
#include "escape/symbolic.hpp"

namespace escape {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Difference that treats equal infinities as equal.
double diff(double a, double b) {
  if (a == b) return 0.0;
  return a - b;
}

void append_error(std::string& e, const std::string& what) {
  if (!e.empty()) e += "; ";
  e += what;
}

}  // namespace

std::vector<double> SweepResult::values(Series s) const {
  std::vector<double> v;
  for (const auto& r : records) v.push_back(s == Series::ulam ? r.rho_ulam : r.rho_mc);
  return v;
}

std::vector<double> SweepResult::stderrs(Series s) const {
  std::vector<double> v;
  for (const auto& r : records) v.push_back(s == Series::ulam ? 0.0 : r.stderr_mc);
  return v;
}

std::vector<GapFlag> SweepResult::flags() const {
  std::vector<GapFlag> v;
  for (const auto& r : records) v.push_back(r.gap_flag);
  return v;
}

SweepResult run(const HoleFamily& family, const SweepConfig& cfg) { return run(family, family.grid(), cfg); }

SweepResult run(const HoleFamily& family, const std::vector<double>& ts, const SweepConfig& cfg) {
  if (int(ts.size()) < cfg.min_samples)
    throw ConfigError("sweep: at least " + std::to_string(cfg.min_samples) + " samples required, got " +
                      std::to_string(ts.size()));
  SweepResult out;
  out.t_samples = ts;
  out.monotone = family.monotone_increasing;
  out.regular = family.spec.kind == HoleKind::regular;

  std::optional<UlamOperator> grid, sgrid;
  if (cfg.run_ulam || cfg.run_survivor) grid = build(cfg.map, cfg.k);
  const int sk = cfg.survivor_k > 0 ? cfg.survivor_k : cfg.k;
  if (cfg.run_survivor && sk != cfg.k) sgrid = build(cfg.map, sk);
  const UlamOperator* survivor_grid = sgrid ? &*sgrid : grid ? &*grid : nullptr;

  std::unique_ptr<MarkovPartition> part;
  if (cfg.depth > 0) {
    if (auto t = std::get_if<TorusMap>(&cfg.map))
      part = std::make_unique<MarkovPartition>(MarkovPartition::toral(*t, cfg.depth));
    else
      part = std::make_unique<MarkovPartition>(MarkovPartition::baker(std::get<BakerMap>(cfg.map), cfg.depth));
  }

  std::vector<double> warm;
  for (double t : ts) {
    SweepRecord rec;
    rec.t = t;
    Hole h;
    try {
      h = family.at(t);
    } catch (const std::exception& e) {
      rec.error = std::string("hole: ") + e.what();
      out.records.push_back(rec);
      continue;
    }
    if (cfg.run_mc) {
      try {
        const auto series = run_series(cfg.map, h, cfg.N, cfg.n_max, cfg.seed, cfg.mode);
        const auto est = estimate(series, cfg.window);
        rec.rho_mc = est.extinct ? -kInf : est.rho_hat;
        rec.rho_mc_lo = est.extinct ? -kInf : est.rho_lower_hat;
        rec.rho_mc_hi = est.extinct ? -kInf : est.rho_upper_hat;
        rec.stderr_mc = est.extinct ? 0.0 : est.std_err;
      } catch (const ImmediateExtinction&) {
        rec.rho_mc = rec.rho_mc_lo = rec.rho_mc_hi = -kInf;
        rec.stderr_mc = 0.0;
      } catch (const std::exception& e) {
        append_error(rec.error, std::string("mc: ") + e.what());
      }
    }
    if (cfg.run_ulam) {
      try {
        LeadingOptions lo;
        lo.throw_on_failure = false;
        if (cfg.warm_start && !warm.empty()) lo.initial = &warm;
        const auto sr = leading(mask(*grid, h, cfg.rule), lo);
        rec.rho_ulam = escape_rate(sr);
        rec.ulam_converged = sr.converged;
        rec.ulam_residual = sr.residual;
        if (!sr.converged) append_error(rec.error, "ulam: power iteration did not converge");
        if (sr.r_lead > 0) warm = sr.qsd;
      } catch (const ImmediateExtinction&) {
        rec.rho_ulam = -kInf;
        rec.ulam_converged = true;
        rec.ulam_residual = 0.0;
      } catch (const std::exception& e) {
        append_error(rec.error, std::string("ulam: ") + e.what());
      }
    }
    if (cfg.run_survivor) {
      try {
        const auto a = compute(cfg.map, *survivor_grid, h, cfg.survivor_n, cfg.survivor);
        rec.gap = boundary_gap(a, h);
        rec.gap_flag = classify(a, rec.gap);
        rec.survivor_count = a.count();
      } catch (const std::exception& e) {
        append_error(rec.error, std::string("survivor: ") + e.what());
      }
    }
    if (part) {
      try {
        const auto rep = pressure_report(*part, h);
        rec.p_upper = rep.p_upper;
        rec.p_lower = std::max(rep.p_lower, rep.p_lower_entropy);
        rec.aligned = rep.aligned;
      } catch (const std::exception& e) {
        append_error(rec.error, std::string("pressure: ") + e.what());
      }
    }
    out.records.push_back(rec);
  }
  return out;
}

StaircaseReport staircase(const std::vector<double>& t, const std::vector<double>& rho,
                          const std::vector<double>& se, const std::vector<GapFlag>& flags,
                          const StaircaseOptions& opt) {
  const int n = int(rho.size());
  if (int(t.size()) != n) throw ConfigError("staircase: t and rho differ in length");
  StaircaseReport rep;
  if (n == 0) return rep;
  auto sig = [&](int i) { return i < int(se.size()) && std::isfinite(se[std::size_t(i)]) ? se[std::size_t(i)] : 0.0; };

  for (int i = 0; i < n;) {
    int j = i;
    double tv = 0;
    while (j + 1 < n) {
      const double d = std::abs(diff(rho[std::size_t(j + 1)], rho[std::size_t(j)]));
      if (!(tv + d < opt.tol_plateau)) break;
      tv += d;
      ++j;
    }
    if (j > i) {
      Plateau p{i, j, t[std::size_t(i)], t[std::size_t(j)], 0};
      double s = 0;
      for (int q = i; q <= j; ++q) s += rho[std::size_t(q)];
      p.value = std::isfinite(s) ? s / (j - i + 1) : rho[std::size_t(i)];
      rep.plateaus.push_back(p);
    }
    i = j + 1;
  }
  const double span = t.back() - t.front();
  double covered = 0;
  for (const auto& p : rep.plateaus) covered += p.t1 - p.t0;
  rep.plateau_fraction = span > 0 ? covered / span : 0.0;

  auto touch = [&](int i) { return i >= 0 && i < int(flags.size()) && flags[std::size_t(i)] == GapFlag::touch; };
  for (int i = 1; i < n; ++i) {
    const double d = diff(rho[std::size_t(i)], rho[std::size_t(i - 1)]);
    if (std::isnan(d)) continue;
    const double comb = std::sqrt(sig(i) * sig(i) + sig(i - 1) * sig(i - 1));
    if (d > std::max(opt.tol_monotone, opt.sigma_monotone * comb)) ++rep.monotone_violations;
    if (std::abs(d) > opt.tol_jump) {
      Jump jp{i, t[std::size_t(i - 1)], t[std::size_t(i)], rho[std::size_t(i - 1)], rho[std::size_t(i)], false};
      jp.colocated = touch(i - 2) || touch(i - 1) || touch(i) || touch(i + 1);
      rep.jumps_colocated = rep.jumps_colocated && jp.colocated;
      rep.jumps.push_back(jp);
    }
  }
  return rep;
}

StaircaseReport staircase(const SweepResult& sr, SweepResult::Series s, const StaircaseOptions& opt) {
  return staircase(sr.t_samples, sr.values(s), sr.stderrs(s), sr.flags(), opt);
}

HolderFit holder_fit(const std::vector<double>& t, const std::vector<double>& rho, double t_lo, double t_hi) {
  std::vector<double> ts, rs;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_lo && t[i] <= t_hi && std::isfinite(rho[i])) {
      ts.push_back(t[i]);
      rs.push_back(rho[i]);
    }
  HolderFit fit;
  const int n = int(ts.size());
  if (n < 3) throw ConfigError("holder_fit: fewer than 3 finite samples in range");
  double scale = 0;
  for (double r : rs) scale = std::max(scale, std::abs(r));
  std::vector<double> x, y;
  for (int m = 1; m <= n / 2; ++m) {
    double w = 0, h = 0;
    for (int i = 0; i + m < n; ++i) {
      w = std::max(w, std::abs(rs[std::size_t(i + m)] - rs[std::size_t(i)]));
      h += ts[std::size_t(i + m)] - ts[std::size_t(i)];
    }
    h /= double(n - m);
    if (w > 1e-12 * std::max(1.0, scale) && h > 0) {
      x.push_back(std::log(h));
      y.push_back(std::log(w));
    }
  }
  fit.lags = int(x.size());
  if (fit.lags < 2) {
    fit.plateau = true;
    return fit;
  }
  const double k = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / k;
    my += y[i] / k;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.alpha = sxy / sxx;
  const double a = my - fit.alpha * mx;
  fit.C = std::exp(a);
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - a - fit.alpha * x[i], 2);
  fit.residual_rms = std::sqrt(ss / k);
  fit.alpha_stderr = k > 2 ? std::sqrt(ss / (k - 2) / sxx) : 0.0;
  fit.alpha_positive = fit.alpha - 2 * fit.alpha_stderr > 0;
  return fit;
}

std::string to_string(Continuity c) {
  switch (c) {
    case Continuity::continuous:
      return "continuous";
    case Continuity::lsc_violating:
      return "lsc-violating";
    case Continuity::usc_violating:
      return "usc-violating";
    case Continuity::both_violating:
      return "lsc-and-usc-violating";
    default:
      return "undecided";
  }
}

SemicontinuityReport semicontinuity(const std::vector<double>& rho, const std::vector<double>& se, int i,
                                    double tol) {
  const int n = int(rho.size());
  if (i <= 0 || i >= n - 1) throw ConfigError("semicontinuity: index must be an interior sample");
  auto sig = [&](int q) { return q < int(se.size()) && std::isfinite(se[std::size_t(q)]) ? se[std::size_t(q)] : 0.0; };
  SemicontinuityReport r;
  r.index = i;
  r.value = rho[std::size_t(i)];
  r.left = rho[std::size_t(i - 1)];
  r.right = rho[std::size_t(i + 1)];
  const double s = std::max({sig(i - 1), sig(i), sig(i + 1)});
  r.noise = tol + 3 * std::sqrt(2.0) * s;
  const double dl = diff(r.left, r.value), dr = diff(r.right, r.value);
  const bool lsc_bad = dl < -r.noise || dr < -r.noise;
  const bool usc_bad = dl > r.noise || dr > r.noise;
  if (lsc_bad && usc_bad)
    r.cls = Continuity::both_violating;
  else if (lsc_bad)
    r.cls = Continuity::lsc_violating;
  else if (usc_bad)
    r.cls = Continuity::usc_violating;
  else if (std::abs(dl) <= tol && std::abs(dr) <= tol)
    r.cls = Continuity::continuous;
  else
    r.cls = Continuity::undecided;
  return r;
}

SemicontinuityReport semicontinuity(const SweepResult& sr, int i, SweepResult::Series s, double tol) {
  SemicontinuityReport r = semicontinuity(sr.values(s), sr.stderrs(s), i, tol);
  if (s == SweepResult::Series::mc) {
    // Brackets separated at t while the upper bracket shows no lsc failure
    // would contradict the existence statement.
    std::vector<double> hi;
    for (const auto& rec : sr.records) hi.push_back(rec.rho_mc_hi);
    const auto rh = semicontinuity(hi, sr.stderrs(s), i, tol);
    const auto& rec = sr.records[std::size_t(i)];
    const bool separated = diff(rec.rho_mc_hi, rec.rho_mc_lo) > r.noise;
    const bool hi_lsc = rh.cls == Continuity::continuous || rh.cls == Continuity::usc_violating;
    r.implication_consistent = !(separated && hi_lsc);
  }
  return r;
}

}  // namespace escape
