// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "mcflow/error.hpp"

namespace mcflow::svg {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Comments may not contain "--".
std::string comment_safe(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '-' && !out.empty() && out.back() == '-') out += ' ';
    out += c;
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi == lo) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::fabs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

std::vector<double> ticks(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(v);
  return out;
}

std::string header(int width, int height, const std::string& title) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  return o.str();
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
  const double left = 70, right = 20, top = 36, bottom = 48;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!opt.log_y || y > 0.0);
  };
  auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };

  Range xr, yr;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) raise(ErrorKind::FieldMismatch, "series x and y differ in length");
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (usable(s.x[i], s.y[i])) {
        xr.add(s.x[i]);
        yr.add(ty(s.y[i]));
      }
  }
  xr.finish();
  yr.finish();
  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return top + ph - (ty(y) - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << header(opt.width, opt.height, opt.title);
  o << "<!-- data: series,x,y\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      o << comment_safe(s.name) << ',' << full(s.x[i]) << ',' << full(s.y[i]) << '\n';
  o << "-->\n";

  o << "<g stroke=\"#ccc\" stroke-width=\"0.5\">\n";
  for (double v : ticks(xr.lo, xr.hi, 6))
    o << "<line x1=\"" << num(px(v)) << "\" y1=\"" << top << "\" x2=\"" << num(px(v)) << "\" y2=\"" << top + ph
      << "\"/>\n";
  const auto yt = ticks(yr.lo, yr.hi, 5);
  for (double v : yt)
    o << "<line x1=\"" << left << "\" y1=\"" << num(top + ph - (v - yr.lo) / (yr.hi - yr.lo) * ph) << "\" x2=\""
      << left + pw << "\" y2=\"" << num(top + ph - (v - yr.lo) / (yr.hi - yr.lo) * ph) << "\"/>\n";
  o << "</g>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double v : ticks(xr.lo, xr.hi, 6))
    o << "<text x=\"" << num(px(v)) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << num(v)
      << "</text>\n";
  for (double v : yt)
    o << "<text x=\"" << left - 6 << "\" y=\"" << num(top + ph - (v - yr.lo) / (yr.hi - yr.lo) * ph + 4)
      << "\" text-anchor=\"end\">" << (opt.log_y ? "1e" + num(v) : num(v)) << "</text>\n";
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 10 << "\" text-anchor=\"middle\">"
    << escape(opt.x_label) << "</text>\n";
  o << "<text transform=\"translate(16 " << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(opt.y_label) << (opt.log_y ? " (log)" : "") << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (usable(s.x[i], s.y[i])) o << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    o << "\"/>\n";
    o << "<text x=\"" << left + 10 << "\" y=\"" << top + 16 + 14 * k << "\" fill=\"" << color << "\">"
      << escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

namespace {

using Segment = std::array<Vec3, 2>;

std::vector<Segment> outline(const Snapshot& s, double z0) {
  std::vector<Segment> out;
  const auto& p = s.positions;
  if (!s.faces || s.faces->empty()) {
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back({p[i], p[(i + 1) % p.size()]});
    return out;
  }
  for (const Face& f : *s.faces) {
    std::vector<Vec3> hits;
    for (int e = 0; e < 3; ++e) {
      const Vec3& a = p[f[e]];
      const Vec3& b = p[f[(e + 1) % 3]];
      const double da = a.z() - z0, db = b.z() - z0;
      if ((da < 0.0) != (db < 0.0)) hits.push_back(a + (b - a) * (da / (da - db)));
    }
    if (hits.size() == 2) out.push_back({hits[0], hits[1]});
  }
  return out;
}

}  // namespace

std::string silhouettes(const FlowTrajectory& t, const std::vector<std::size_t>& indices, const std::string& title) {
  if (t.snapshots.empty()) raise(ErrorKind::InsufficientData, "trajectory has no snapshots");
  const int size = 480;
  const double margin = 30;
  double z0 = 0.0;
  for (const Vec3& v : t.snapshots.front().positions) z0 += v.z();
  z0 /= static_cast<double>(t.snapshots.front().positions.size());

  std::vector<std::pair<std::size_t, std::vector<Segment>>> shapes;
  Range xr, yr;
  for (std::size_t k : indices) {
    if (k >= t.snapshots.size()) raise(ErrorKind::OutOfRange, "snapshot index out of range");
    auto segs = outline(t.snapshots[k], z0);
    for (const auto& s : segs)
      for (const Vec3& v : s) {
        xr.add(v.x());
        yr.add(v.y());
      }
    shapes.emplace_back(k, std::move(segs));
  }
  xr.finish();
  yr.finish();
  const double span = std::max(xr.hi - xr.lo, yr.hi - yr.lo);
  const double cx = 0.5 * (xr.lo + xr.hi), cy = 0.5 * (yr.lo + yr.hi);
  const double scale = (size - 2 * margin) / span;
  auto px = [&](double x) { return size / 2.0 + (x - cx) * scale; };
  auto py = [&](double y) { return size / 2.0 - (y - cy) * scale; };

  std::ostringstream o;
  o << header(size, size, title);
  o << "<!-- data: snapshot,time,x0,y0,x1,y1\n";
  for (const auto& [k, segs] : shapes)
    for (const auto& s : segs)
      o << k << ',' << full(t.snapshots[k].time) << ',' << full(s[0].x()) << ',' << full(s[0].y()) << ','
        << full(s[1].x()) << ',' << full(s[1].y()) << '\n';
  o << "-->\n";
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const char* color = kPalette[i % kPalette.size()];
    o << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" d=\"";
    for (const auto& s : shapes[i].second)
      o << 'M' << num(px(s[0].x())) << ',' << num(py(s[0].y())) << 'L' << num(px(s[1].x())) << ','
        << num(py(s[1].y())) << ' ';
    o << "\"/>\n";
    o << "<text x=\"8\" y=\"" << 40 + 14 * i << "\" fill=\"" << color << "\">t = "
      << num(t.snapshots[shapes[i].first].time) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace mcflow::svg
