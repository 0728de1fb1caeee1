#pragma once

// Static SVG line plots, emitted directly as text. Fixed canvas, linear axes,
// no external renderer, nothing time-dependent in the output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "annulus_nls/asymptotics.hpp"
#include "annulus_nls/dynamics.hpp"
#include "annulus_nls/mass_curve.hpp"
#include "annulus_nls/soliton.hpp"

namespace annulus_nls::svg {

struct Series {
  std::vector<double> x, y;
  std::string color = "#1f6fb2";
  std::string label;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

}  // namespace detail

inline std::string render_plot(const std::string& title, const std::string& x_label,
                               const std::string& y_label, const std::vector<Series>& series,
                               int width = 860, int height = 560) {
  const double L = 78, R = 24, T = 46, B = 58;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmin <= xmax)) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (!(ymin <= ymax)) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax == ymin) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double pw = width - L - R, ph = height - T - B;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return height - B - (y - ymin) / (ymax - ymin) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"" + detail::num(width / 2.0) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         detail::escape_text(title) + "</text>\n";

  // gridlines + ticks
  for (int k = 0; k <= 5; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 5.0;
    const double yv = ymin + (ymax - ymin) * k / 5.0;
    out += "<line x1=\"" + detail::num(px(xv)) + "\" y1=\"" + detail::num(double(T)) +
           "\" x2=\"" + detail::num(px(xv)) + "\" y2=\"" + detail::num(height - B) +
           "\" stroke=\"#e4e4e4\" stroke-width=\"1\"/>\n";
    out += "<line x1=\"" + detail::num(double(L)) + "\" y1=\"" + detail::num(py(yv)) +
           "\" x2=\"" + detail::num(width - R) + "\" y2=\"" + detail::num(py(yv)) +
           "\" stroke=\"#e4e4e4\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + detail::num(px(xv)) + "\" y=\"" + detail::num(height - B + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::tick_label(xv) + "</text>\n";
    out += "<text x=\"" + detail::num(L - 8) + "\" y=\"" + detail::num(py(yv) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::tick_label(yv) + "</text>\n";
  }

  // frame
  out += "<rect x=\"" + detail::num(double(L)) + "\" y=\"" + detail::num(double(T)) +
         "\" width=\"" + detail::num(pw) + "\" height=\"" + detail::num(ph) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  // polylines; non-finite samples break the line into segments
  for (const auto& s : series) {
    std::string pts;
    auto flush = [&]() {
      if (pts.find(' ') != std::string::npos)  // at least two points
        out += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += detail::num(px(s.x[i])) + "," + detail::num(py(s.y[i]));
    }
    flush();
  }

  // legend (only labelled series), top-right inside the frame
  int slot = 0;
  for (const auto& s : series) {
    if (s.label.empty()) continue;
    const double ly = T + 16 + 16 * slot++;
    out += "<line x1=\"" + detail::num(width - R - 150) + "\" y1=\"" + detail::num(ly - 4) +
           "\" x2=\"" + detail::num(width - R - 126) + "\" y2=\"" + detail::num(ly - 4) +
           "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::num(width - R - 120) + "\" y=\"" + detail::num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + detail::escape_text(s.label) +
           "</text>\n";
  }

  out += "<text x=\"" + detail::num(L + pw / 2.0) + "\" y=\"" + detail::num(height - 12.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         detail::escape_text(x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + detail::num(T + ph / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " +
         detail::num(T + ph / 2.0) + ")\">" + detail::escape_text(y_label) + "</text>\n";
  out += "</svg>\n";
  return out;
}

// Mass curve with branches colored by the sign of d'(lambda).
inline std::string mass_curve_plot(const masscurve::MassCurve& curve) {
  std::vector<Series> series;
  auto classify_point = [](const masscurve::CurvePoint& pt) {
    if (std::abs(pt.mass_slope) <= 1e-6 * std::abs(pt.mass)) return 0;
    return pt.mass_slope > 0.0 ? 1 : -1;
  };
  bool seen_label[3] = {false, false, false};
  std::size_t i = 0;
  while (i < curve.points.size()) {
    const int sign = classify_point(curve.points[i]);
    Series s;
    s.color = sign > 0 ? "#2a9d4e" : (sign < 0 ? "#d43d3d" : "#888888");
    const int slot = sign + 1;
    if (!seen_label[slot]) {
      s.label = sign > 0 ? "d' > 0 (stable)" : (sign < 0 ? "d' < 0 (unstable)" : "marginal");
      seen_label[slot] = true;
    }
    // extend one point past the run so adjacent segments join up
    std::size_t j = i;
    for (; j < curve.points.size() && classify_point(curve.points[j]) == sign; ++j) {
      s.x.push_back(curve.points[j].lambda);
      s.y.push_back(curve.points[j].mass);
    }
    if (j < curve.points.size()) {
      s.x.push_back(curve.points[j].lambda);
      s.y.push_back(curve.points[j].mass);
    }
    series.push_back(std::move(s));
    i = j;
  }
  return render_plot("mass along the ground-state branch", "lambda", "d(lambda)", series);
}

// Rescaled profile against the closed-form soliton on |rho| <= window.
inline std::string soliton_overlay_plot(const asymptotics::Rescaled& omega, double p,
                                        double window = 5.0, int samples = 801) {
  Series numeric, limit;
  numeric.color = "#1f6fb2";
  numeric.label = "rescaled profile";
  limit.color = "#d08a00";
  limit.label = "soliton";
  for (int i = 0; i < samples; ++i) {
    const double rho = -window + 2.0 * window * i / (samples - 1);
    numeric.x.push_back(rho);
    numeric.y.push_back(omega(rho));
    limit.x.push_back(rho);
    limit.y.push_back(asymptotics::soliton_eval(p, rho));
  }
  return render_plot("rescaled profile vs limit soliton", "rho", "omega(rho)",
                     {numeric, limit});
}

// Orbital distance over time; optional horizontal detection threshold.
inline std::string orbital_trace_plot(const dynamics::EvolutionTrace& tr,
                                      double threshold = 0.0) {
  Series d;
  d.color = "#1f6fb2";
  d.label = "orbital distance";
  d.x = tr.times;
  d.y = tr.orbital_distance_series;
  std::vector<Series> series{d};
  if (threshold > 0.0 && !tr.times.empty()) {
    Series th;
    th.color = "#d43d3d";
    th.label = "detection threshold";
    th.x = {tr.times.front(), tr.times.back()};
    th.y = {threshold, threshold};
    series.push_back(th);
  }
  return render_plot("distance to the standing-wave orbit", "t", "delta(t)", series);
}

}  // namespace annulus_nls::svg
