#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "escape/artifacts.hpp"

namespace escape {

namespace {

constexpr double kW = 720, kH = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string staircase_svg(const SweepResult& r, const StaircaseReport& st, SweepResult::Series series) {
  const auto& t = r.t_samples;
  const auto rho = r.values(series);
  double lo = INFINITY, hi = -INFINITY;
  bool floor_used = false;
  for (double v : rho) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    } else if (v < 0) {
      floor_used = true;
    }
  }
  if (!std::isfinite(lo)) lo = -1, hi = 0;
  if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
  const double pad = 0.05 * (hi - lo);
  hi += pad;
  lo -= floor_used ? 3 * pad : pad;
  const double floor_v = lo + pad;  // where -inf samples are drawn
  const double t0 = t.empty() ? 0 : t.front(), t1 = t.empty() ? 1 : std::max(t.back(), t0 + 1e-12);
  auto X = [&](double v) { return kLeft + (v - t0) / (t1 - t0) * (kW - kLeft - kRight); };
  auto Y = [&](double v) { return kTop + (hi - v) / (hi - lo) * (kH - kTop - kBottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
     << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& p : st.plateaus)
    os << "<rect x=\"" << num(X(p.t0)) << "\" y=\"" << kTop << "\" width=\"" << num(std::max(1.0, X(p.t1) - X(p.t0)))
       << "\" height=\"" << kH - kTop - kBottom << "\" fill=\"#cfe3f7\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight << "\" y2=\"" << kH - kBottom
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kH - kBottom
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tv = t0 + (t1 - t0) * i / 4, rv = lo + (hi - lo) * i / 4;
    os << "<text x=\"" << num(X(tv)) << "\" y=\"" << kH - kBottom + 18 << "\" text-anchor=\"middle\">" << label(tv)
       << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(Y(rv) + 4) << "\" text-anchor=\"end\">" << label(rv)
       << "</text>\n";
  }
  os << "<text x=\"" << (kW + kLeft) / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">t</text>\n";
  os << "<text x=\"16\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 16 " << kH / 2
     << ")\" text-anchor=\"middle\">rho</text>\n";
  if (floor_used)
    os << "<text x=\"" << kLeft + 4 << "\" y=\"" << num(Y(floor_v) - 4) << "\" fill=\"#a33\">-inf</text>\n";

  os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < t.size() && i < rho.size(); ++i) {
    const double v = rho[i];
    if (std::isnan(v)) continue;
    os << num(X(t[i])) << ',' << num(Y(std::isfinite(v) ? v : floor_v)) << ' ';
  }
  os << "\"/>\n";
  for (const auto& j : st.jumps)
    os << "<line x1=\"" << num(X(0.5 * (j.t_left + j.t_right))) << "\" y1=\"" << kTop << "\" x2=\""
       << num(X(0.5 * (j.t_left + j.t_right))) << "\" y2=\"" << kH - kBottom << "\" stroke=\""
       << (j.colocated ? "#888" : "#d22") << "\" stroke-dasharray=\"4 3\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace escape
