#include "escape/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "escape/errors.hpp"

namespace escape {

namespace {

Json num(double v) {
  // JSON has no infinities: encode them as strings, keep finite values numeric.
  if (std::isfinite(v)) return v;
  return fmt(v);
}

}  // namespace

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string series_csv(const SurvivorSeries& s) {
  std::ostringstream os;
  os << "n,survivors,rate,cum_log_measure\n";
  for (std::size_t n = 0; n < s.counts.size(); ++n) {
    os << n << ',' << s.counts[n] << ',';
    os << (n < s.per_step_rate.size() ? fmt(s.per_step_rate[n]) : "nan") << ',';
    os << (n < s.cum_log_measure.size() ? fmt(s.cum_log_measure[n]) : "nan") << '\n';
  }
  return os.str();
}

std::string qsd_csv(const UlamOperator& op, const SpectralResult& sr) {
  std::ostringstream os;
  os << "cell_i,cell_j,mass\n";
  for (int c = 0; c < int(sr.qsd.size()); ++c)
    if (sr.qsd[std::size_t(c)] != 0.0) os << c % op.k << ',' << c / op.k << ',' << fmt(sr.qsd[std::size_t(c)]) << '\n';
  return os.str();
}

std::string omega_csv(const SurvivorApprox& a) {
  std::ostringstream os;
  os << "cell_i,cell_j,retained_at_n\n";
  for (int c = 0; c < int(a.retained.size()); ++c)
    os << c % a.k << ',' << c / a.k << ',' << int(a.retained[std::size_t(c)]) << '\n';
  return os.str();
}

std::string closeness_csv(const ClosenessReport& r) {
  std::ostringstream os;
  os << "pair_id,agreement_depth,r1,r2,abs_diff\n";
  for (const auto& row : r.rows)
    os << row.pair_id << ',' << row.depth << ',' << fmt(row.r1) << ',' << fmt(row.r2) << ',' << fmt(row.abs_diff)
       << '\n';
  return os.str();
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "t,rho_mc,rho_mc_lo,rho_mc_hi,stderr,rho_ulam,p_upper,p_lower,gap_flag\n";
  for (const auto& x : r.records)
    os << fmt(x.t) << ',' << fmt(x.rho_mc) << ',' << fmt(x.rho_mc_lo) << ',' << fmt(x.rho_mc_hi) << ','
       << fmt(x.stderr_mc) << ',' << fmt(x.rho_ulam) << ',' << fmt(x.p_upper) << ',' << fmt(x.p_lower) << ','
       << to_string(x.gap_flag) << '\n';
  return os.str();
}

Json to_json(const SpectralResult& sr) {
  return {{"r_lead", num(sr.r_lead)},       {"rho", num(escape_rate(sr))},  {"iterations", sr.iterations},
          {"residual", num(sr.residual)},   {"gap_proxy", num(sr.gap_proxy)}, {"converged", sr.converged}};
}

Json to_json(const StaircaseReport& r) {
  Json plateaus = Json::array(), jumps = Json::array();
  for (const auto& p : r.plateaus)
    plateaus.push_back({{"i0", p.i0}, {"i1", p.i1}, {"t0", p.t0}, {"t1", p.t1}, {"value", num(p.value)}});
  for (const auto& j : r.jumps)
    jumps.push_back({{"index", j.index},
                     {"t_left", j.t_left},
                     {"t_right", j.t_right},
                     {"left", num(j.left)},
                     {"right", num(j.right)},
                     {"colocated", j.colocated}});
  return {{"plateaus", plateaus},
          {"jumps", jumps},
          {"monotone_violations", r.monotone_violations},
          {"plateau_fraction", r.plateau_fraction},
          {"jumps_colocated", r.jumps_colocated}};
}

Json to_json(const HolderFit& f) {
  return {{"C", num(f.C)},
          {"alpha", num(f.alpha)},
          {"alpha_stderr", num(f.alpha_stderr)},
          {"residual_rms", num(f.residual_rms)},
          {"lags", f.lags},
          {"plateau", f.plateau},
          {"alpha_positive", f.alpha_positive}};
}

Json to_json(const SemicontinuityReport& r) {
  return {{"index", r.index},
          {"value", num(r.value)},
          {"left", num(r.left)},
          {"right", num(r.right)},
          {"noise", num(r.noise)},
          {"class", to_string(r.cls)},
          {"implication_consistent", r.implication_consistent}};
}

}  // namespace escape
