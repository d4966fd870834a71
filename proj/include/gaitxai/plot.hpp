#pragma once

// Heel-distance plot: raw and smoothed d[t] against frame, with markers on the
// retained maxima. Emitted as SVG plus a CSV of the same series.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "gaitxai/io.hpp"
#include "gaitxai/signal.hpp"

namespace gaitxai {

struct PlotStyle {
  double width = 900.0;
  double height = 360.0;
  double margin_left = 60.0;
  double margin_right = 20.0;
  double margin_top = 30.0;
  double margin_bottom = 50.0;
};

namespace plot_detail {
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}
}  // namespace plot_detail

inline std::string distance_plot_svg(const GaitAnalysis& a, const std::string& title,
                                     const PlotStyle& style = {}) {
  using plot_detail::num;
  const std::size_t n = a.raw.size();
  const double plot_w = style.width - style.margin_left - style.margin_right;
  const double plot_h = style.height - style.margin_top - style.margin_bottom;
  double y_max = 0.0;
  for (double v : a.raw.values) y_max = std::max(y_max, v);
  for (double v : a.smoothed.values) y_max = std::max(y_max, v);
  if (!(y_max > 0.0)) y_max = 1.0;
  y_max *= 1.05;
  const double x_span = n > 1 ? static_cast<double>(n - 1) : 1.0;
  auto px = [&](double frame) { return style.margin_left + plot_w * frame / x_span; };
  auto py = [&](double v) { return style.margin_top + plot_h * (1.0 - v / y_max); };

  auto polyline = [&](const std::vector<double>& values, const char* cls, const char* color,
                      double stroke) {
    std::string s = "<polyline class=\"" + std::string(cls) + "\" fill=\"none\" stroke=\"" +
                    color + "\" stroke-width=\"" + num(stroke) + "\" points=\"";
    for (std::size_t t = 0; t < values.size(); ++t) {
      if (t) s += ' ';
      s += num(px(static_cast<double>(t))) + "," + num(py(values[t]));
    }
    s += "\"/>\n";
    return s;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(style.width) +
         "\" height=\"" + num(style.height) + "\" viewBox=\"0 0 " + num(style.width) + " " +
         num(style.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(style.width / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" +
         plot_detail::xml_escape(title) + "</text>\n";

  // Axes and ticks: one x tick per second of video.
  const double x0 = style.margin_left;
  const double y0 = style.margin_top + plot_h;
  svg += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0 + plot_w) +
         "\" y2=\"" + num(y0) + "\"/>\n";
  svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(style.margin_top) + "\" x2=\"" + num(x0) +
         "\" y2=\"" + num(y0) + "\"/>\n";
  svg += "</g>\n<g class=\"ticks\" font-size=\"10\">\n";
  const double fps = a.raw.frame_rate_hz > 0.0 ? a.raw.frame_rate_hz : 30.0;
  const auto step = static_cast<std::size_t>(std::max(1.0, std::round(fps)));
  for (std::size_t f = 0; f < n; f += step) {
    const double x = px(static_cast<double>(f));
    svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(y0 + 4) + "\" stroke=\"black\"/>";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" +
           std::to_string(f) + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = y_max * i / 4.0;
    svg += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(py(v) + 3) + "\" text-anchor=\"end\">" +
           num(v) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + num(x0 + plot_w / 2) + "\" y=\"" + num(style.height - 10) +
         "\" text-anchor=\"middle\" font-size=\"12\">frame (" + std::to_string(step) +
         " frames = 1 second)</text>\n";
  svg += "<text x=\"14\" y=\"" + num(style.margin_top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " +
         num(style.margin_top + plot_h / 2) + ")\">heel distance (normalized)</text>\n";

  svg += polyline(a.raw.values, "raw", "#9e9e9e", 1.0);
  svg += polyline(a.smoothed.values, "smoothed", "#1f77b4", 2.0);
  for (const auto& p : a.retained) {
    const double v = p.frame < a.smoothed.size() ? a.smoothed.values[p.frame] : p.value;
    svg += "<circle class=\"maximum\" cx=\"" + num(px(static_cast<double>(p.frame))) +
           "\" cy=\"" + num(py(v)) + "\" r=\"4\" fill=\"#d62728\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string distance_plot_csv(const GaitAnalysis& a) {
  std::set<std::size_t> maxima;
  for (const auto& p : a.retained) maxima.insert(p.frame);
  std::string out = "frame,d_raw,d_smooth,is_maximum\n";
  for (std::size_t t = 0; t < a.raw.size(); ++t) {
    out += std::to_string(t) + "," + format_double(a.raw.values[t]) + "," +
           format_double(a.smoothed.values[t]) + "," + (maxima.count(t) ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace gaitxai
