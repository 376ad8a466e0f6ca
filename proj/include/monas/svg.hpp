#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "monas/metrics.hpp"

namespace monas {

// Shortest round-trip decimal form; reused by the CSV writers so logs are
// byte-identical across runs and worker counts.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace detail {

inline std::string format_tick(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, end);
}

}  // namespace detail

// Static scatter plot of (params, error) population snapshots, one color
// per recorded generation.
inline std::string scatter_svg(const std::string& title,
                               const std::vector<FrontSnapshot>& snapshots) {
  constexpr int kW = 640, kH = 440, kL = 70, kR = 140, kT = 40, kB = 50;
  constexpr const char* kColors[] = {"#4477aa", "#66ccee", "#228833",
                                     "#ccbb44", "#ee6677", "#aa3377"};
  constexpr int kColorCount = 6;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const FrontSnapshot& snap : snapshots) {
    for (const ParetoPoint& p : snap.points) {
      xmin = std::min(xmin, p.params);
      xmax = std::max(xmax, p.params);
      ymin = std::min(ymin, p.error);
      ymax = std::max(ymax, p.error);
    }
  }
  if (!(xmin <= xmax)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1e-6;
  const double xpad = 0.04 * (xmax - xmin), ypad = 0.04 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  auto sx = [&](double x) { return kL + (x - xmin) / (xmax - xmin) * (kW - kL - kR); };
  auto sy = [&](double y) { return kH - kB - (y - ymin) / (ymax - ymin) * (kH - kT - kB); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kW) +
       "\" height=\"" + std::to_string(kH) + "\" viewBox=\"0 0 " + std::to_string(kW) +
       " " + std::to_string(kH) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string((kL + kW - kR) / 2) + "\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";

  // axes
  s += "<line x1=\"" + std::to_string(kL) + "\" y1=\"" + std::to_string(kH - kB) +
       "\" x2=\"" + std::to_string(kW - kR) + "\" y2=\"" + std::to_string(kH - kB) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + std::to_string(kL) + "\" y1=\"" + std::to_string(kT) +
       "\" x2=\"" + std::to_string(kL) + "\" y2=\"" + std::to_string(kH - kB) +
       "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4;
    const double yv = ymin + (ymax - ymin) * k / 4;
    s += "<text x=\"" + format_double(sx(xv)) + "\" y=\"" + std::to_string(kH - kB + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::format_tick(xv) + "</text>\n";
    s += "<text x=\"" + std::to_string(kL - 8) + "\" y=\"" + format_double(sy(yv) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::format_tick(yv) + "</text>\n";
  }
  s += "<text x=\"" + std::to_string((kL + kW - kR) / 2) + "\" y=\"" +
       std::to_string(kH - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">parameters</text>\n";
  s += "<text x=\"18\" y=\"" + std::to_string((kT + kH - kB) / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       "transform=\"rotate(-90 18 " + std::to_string((kT + kH - kB) / 2) +
       ")\">validation error</text>\n";

  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const char* color = kColors[i % kColorCount];
    for (const ParetoPoint& p : snapshots[i].points) {
      s += "<circle cx=\"" + format_double(sx(p.params)) + "\" cy=\"" +
           format_double(sy(p.error)) + "\" r=\"3\" fill=\"" + color +
           "\" fill-opacity=\"0.75\"/>\n";
    }
    const int ly = kT + 10 + static_cast<int>(i) * 18;
    s += "<circle cx=\"" + std::to_string(kW - kR + 16) + "\" cy=\"" + std::to_string(ly) +
         "\" r=\"4\" fill=\"" + color + "\"/>\n";
    s += "<text x=\"" + std::to_string(kW - kR + 28) + "\" y=\"" + std::to_string(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"12\">generation " +
         std::to_string(snapshots[i].generation) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace monas
