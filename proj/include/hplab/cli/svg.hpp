#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace hplab::cli {

struct PointSet {
  std::string label, color;
  std::vector<std::complex<double>> points;
};

struct Polyline {
  std::string label, color;
  std::vector<std::complex<double>> points;
};

struct RealSegment {
  double lo, hi;
};

struct Viewport {
  double xmin, xmax, ymin, ymax;
};

struct SvgScene {
  std::string title;
  std::vector<PointSet> sets;
  std::vector<Polyline> arcs;
  std::vector<RealSegment> segments;
  std::optional<Viewport> viewport;  // derived from the data when absent
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '&') o += "&amp;";
    else if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '"') o += "&quot;";
    else o += c;
  }
  return o;
}

// Square window around all finite data, padded by 10%.
inline Viewport fit(const SvgScene& s) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto add = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
  };
  for (const auto& ps : s.sets)
    for (auto z : ps.points) add(z.real(), z.imag());
  for (const auto& a : s.arcs)
    for (auto z : a.points) add(z.real(), z.imag());
  for (const auto& g : s.segments) add(g.lo, 0), add(g.hi, 0);
  if (!(x0 <= x1)) return {-1, 1, -1, 1};
  double half = std::max({x1 - x0, y1 - y0, 1e-6}) * 0.55, cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
  return {cx - half, cx + half, cy - half, cy + half};
}

}  // namespace detail

// Scatter plot on a 600x600 canvas with a legend; markers carry
// class="marker", shape cycling circle / square / triangle per set.
inline std::string render_svg(const SvgScene& s) {
  using detail::fmt;
  const double W = 600, H = 600, pad = 40;
  Viewport v = s.viewport ? *s.viewport : detail::fit(s);
  auto px = [&](double x) { return pad + (x - v.xmin) / (v.xmax - v.xmin) * (W - 2 * pad); };
  auto py = [&](double y) { return H - pad - (y - v.ymin) / (v.ymax - v.ymin) * (H - 2 * pad); };
  auto inside = [&](std::complex<double> z) {
    return z.real() >= v.xmin && z.real() <= v.xmax && z.imag() >= v.ymin && z.imag() <= v.ymax;
  };
  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  o += "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\"/>\n";
  if (!s.title.empty())
    o += "<text x=\"300\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + detail::escape(s.title) + "</text>\n";
  // axes through the origin when visible, else along the frame
  double ax = std::clamp(0.0, v.ymin, v.ymax), ay = std::clamp(0.0, v.xmin, v.xmax);
  o += "<g class=\"axes\" stroke=\"#888\" stroke-width=\"1\">\n";
  o += "<line x1=\"" + fmt(pad) + "\" y1=\"" + fmt(py(ax)) + "\" x2=\"" + fmt(W - pad) + "\" y2=\"" + fmt(py(ax)) + "\"/>\n";
  o += "<line x1=\"" + fmt(px(ay)) + "\" y1=\"" + fmt(pad) + "\" x2=\"" + fmt(px(ay)) + "\" y2=\"" + fmt(H - pad) + "\"/>\n";
  o += "</g>\n";
  o += "<text x=\"" + fmt(pad) + "\" y=\"" + fmt(H - 10) + "\" font-size=\"10\">[" + fmt(v.xmin) + ", " + fmt(v.xmax) +
       "] x [" + fmt(v.ymin) + ", " + fmt(v.ymax) + "]</text>\n";
  for (const auto& g : s.segments)
    o += "<line class=\"segment\" x1=\"" + fmt(px(std::max(g.lo, v.xmin))) + "\" y1=\"" + fmt(py(0)) + "\" x2=\"" +
         fmt(px(std::min(g.hi, v.xmax))) + "\" y2=\"" + fmt(py(0)) + "\" stroke=\"black\" stroke-width=\"3\"/>\n";
  for (const auto& a : s.arcs) {
    if (a.points.empty()) continue;
    o += "<polyline class=\"arc\" fill=\"none\" stroke=\"" + a.color + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < a.points.size(); ++i)
      o += (i ? " " : "") + fmt(px(a.points[i].real())) + "," + fmt(py(a.points[i].imag()));
    o += "\"/>\n";
  }
  for (std::size_t k = 0; k < s.sets.size(); ++k) {
    const auto& ps = s.sets[k];
    o += "<g fill=\"" + ps.color + "\">\n";
    for (auto z : ps.points) {
      if (!inside(z)) continue;
      double x = px(z.real()), y = py(z.imag());
      switch (k % 3) {
        case 0:
          o += "<circle class=\"marker\" cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"2.5\"/>\n";
          break;
        case 1:
          o += "<rect class=\"marker\" x=\"" + fmt(x - 2.5) + "\" y=\"" + fmt(y - 2.5) + "\" width=\"5\" height=\"5\"/>\n";
          break;
        default:
          o += "<polygon class=\"marker\" points=\"" + fmt(x) + "," + fmt(y - 3) + " " + fmt(x - 3) + "," + fmt(y + 2.5) +
               " " + fmt(x + 3) + "," + fmt(y + 2.5) + "\"/>\n";
      }
    }
    o += "</g>\n";
  }
  o += "<g class=\"legend\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < s.sets.size(); ++k) {
    double y = 40 + 18 * static_cast<double>(k);
    o += "<g class=\"legend-entry\"><rect x=\"470\" y=\"" + fmt(y - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
         s.sets[k].color + "\"/><text x=\"486\" y=\"" + fmt(y) + "\">" + detail::escape(s.sets[k].label) + " (" +
         std::to_string(s.sets[k].points.size()) + ")</text></g>\n";
  }
  o += "</g>\n</svg>\n";
  return o;
}

}  // namespace hplab::cli
