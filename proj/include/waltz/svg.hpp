#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "waltz/csv.hpp"

namespace waltz::svg {

struct Series {
  std::string name;
  std::vector<double> values;
  std::vector<double> spread;  // optional +- band (std); empty = none
};

namespace detail {

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#4878cf", "#d65f5f", "#6acc65", "#b47cc7",
                                 "#c4ad66", "#77bedb"};
  return colors[i % 6];
}

inline std::string num(double v) { return csv::format(std::round(v * 100.0) / 100.0); }

inline void text(std::string& out, double x, double y, const std::string& s,
                 const std::string& anchor = "middle", int size = 11) {
  out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor +
         "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) + "\">" +
         s + "</text>\n";
}

}  // namespace detail

/// Grouped bar chart; one group per category, one bar per series.
inline std::string bar_chart(const std::string& title,
                             const std::vector<std::string>& categories,
                             const std::vector<Series>& series, double y_min = 0.0,
                             double y_max = 0.0) {
  const double width = 720, height = 360;
  const double left = 60, right = 20, top = 40, bottom = 70;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  double lo = y_min, hi = y_max;
  if (lo == hi) {
    for (const Series& s : series)
      for (double v : s.values) hi = std::max(hi, v);
    hi = hi <= lo ? lo + 1.0 : hi * 1.1;
  }
  const auto y_of = [&](double v) {
    return top + plot_h * (1.0 - (v - lo) / (hi - lo));
  };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    detail::num(width) + "\" height=\"" + detail::num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  detail::text(out, width / 2, 22, title, "middle", 14);

  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    const double y = y_of(v);
    out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(y) + "\" x2=\"" +
           detail::num(width - right) + "\" y2=\"" + detail::num(y) +
           "\" stroke=\"#dddddd\"/>\n";
    detail::text(out, left - 8, y + 4, detail::num(v), "end", 10);
  }

  const std::size_t ncat = categories.size();
  const std::size_t nser = std::max<std::size_t>(series.size(), 1);
  const double group_w = plot_w / std::max<std::size_t>(ncat, 1);
  const double bar_w = group_w * 0.8 / nser;

  for (std::size_t c = 0; c < ncat; ++c) {
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (c >= series[s].values.size()) continue;
      const double v = series[s].values[c];
      const double x = left + c * group_w + group_w * 0.1 + s * bar_w;
      const double y0 = y_of(std::max(v, lo));
      const double y1 = y_of(lo);
      out += "<rect x=\"" + detail::num(x) + "\" y=\"" + detail::num(y0) + "\" width=\"" +
             detail::num(bar_w * 0.92) + "\" height=\"" + detail::num(y1 - y0) +
             "\" fill=\"" + detail::palette(s) + "\"/>\n";
    }
    // category label, rotated to fit long trial names
    const double cx = left + c * group_w + group_w / 2;
    out += "<g transform=\"translate(" + detail::num(cx) + "," +
           detail::num(height - bottom + 14) + ") rotate(40)\">";
    out += "<text text-anchor=\"start\" font-family=\"sans-serif\" font-size=\"10\">" +
           categories[c] + "</text></g>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const double x = left + s * 120.0;
    out += "<rect x=\"" + detail::num(x) + "\" y=\"" + detail::num(height - 16) +
           "\" width=\"10\" height=\"10\" fill=\"" + std::string(detail::palette(s)) +
           "\"/>\n";
    detail::text(out, x + 16, height - 7, series[s].name, "start", 11);
  }
  out += "</svg>\n";
  return out;
}

/// Line chart with an optional shaded +-spread band per series.
inline std::string line_chart(const std::string& title,
                              const std::vector<double>& x_values,
                              const std::vector<Series>& series, double y_min = 0.0,
                              double y_max = 0.0) {
  const double width = 720, height = 360;
  const double left = 60, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  double lo = y_min, hi = y_max;
  if (lo == hi) {
    for (const Series& s : series)
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double d = i < s.spread.size() ? s.spread[i] : 0.0;
        lo = std::min(lo, s.values[i] - d);
        hi = std::max(hi, s.values[i] + d);
      }
    if (hi <= lo) hi = lo + 1.0;
  }
  double x_lo = 0.0, x_hi = 1.0;
  if (!x_values.empty()) {
    x_lo = *std::min_element(x_values.begin(), x_values.end());
    x_hi = *std::max_element(x_values.begin(), x_values.end());
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  }
  const auto x_of = [&](double v) { return left + plot_w * (v - x_lo) / (x_hi - x_lo); };
  const auto y_of = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    detail::num(width) + "\" height=\"" + detail::num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  detail::text(out, width / 2, 22, title, "middle", 14);

  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(y_of(v)) +
           "\" x2=\"" + detail::num(width - right) + "\" y2=\"" + detail::num(y_of(v)) +
           "\" stroke=\"#dddddd\"/>\n";
    detail::text(out, left - 8, y_of(v) + 4, detail::num(v), "end", 10);
  }
  for (double xv : x_values)
    detail::text(out, x_of(xv), height - bottom + 16, detail::num(xv), "middle", 10);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const Series& ser = series[s];
    const std::size_t n = std::min(ser.values.size(), x_values.size());
    if (!ser.spread.empty()) {
      std::string pts;
      for (std::size_t i = 0; i < n; ++i)
        pts += detail::num(x_of(x_values[i])) + "," +
               detail::num(y_of(ser.values[i] + ser.spread[i])) + " ";
      for (std::size_t i = n; i-- > 0;)
        pts += detail::num(x_of(x_values[i])) + "," +
               detail::num(y_of(ser.values[i] - ser.spread[i])) + " ";
      out += "<polygon points=\"" + pts + "\" fill=\"" + detail::palette(s) +
             "\" opacity=\"0.15\"/>\n";
    }
    std::string pts;
    for (std::size_t i = 0; i < n; ++i)
      pts += detail::num(x_of(x_values[i])) + "," + detail::num(y_of(ser.values[i])) + " ";
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
           detail::palette(s) + "\" stroke-width=\"2\"/>\n";
    const double lx = left + s * 140.0;
    out += "<rect x=\"" + detail::num(lx) + "\" y=\"" + detail::num(height - 14) +
           "\" width=\"10\" height=\"10\" fill=\"" + std::string(detail::palette(s)) +
           "\"/>\n";
    detail::text(out, lx + 16, height - 5, ser.name, "start", 11);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace waltz::svg
