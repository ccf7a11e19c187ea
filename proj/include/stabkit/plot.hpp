#ifndef STABKIT_PLOT_HPP
#define STABKIT_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stabkit/core.hpp"
#include "stabkit/io.hpp"

namespace stabkit::plot {

/// `states`: one panel per state column plus `u` (trajectory CSV).
/// `all`: one panel per non-time column (trajectory CSV).
/// `curve`: value against abscissa (estimate CSV).
enum class Style { states, all, curve };

inline Style parse_style(const std::string& s) {
  if (s == "states") return Style::states;
  if (s == "all") return Style::all;
  if (s == "curve") return Style::curve;
  throw ParameterError("unknown plot style '" + s + "' (expected states, all or curve)");
}

inline bool is_estimate_table(const io::Table& t) {
  return t.header.size() == 2 && t.header[0] == "abscissa" && t.header[1] == "value";
}

inline bool is_trajectory_table(const io::Table& t) { return t.header.size() >= 2 && t.header[0] == "t"; }

inline Style default_style(const io::Table& t) { return is_estimate_table(t) ? Style::curve : Style::states; }

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

/// At most 2 * buckets points: per bucket the first occurrences of min and max, in order.
inline std::vector<std::size_t> decimate(const std::vector<double>& y, std::size_t buckets) {
  std::vector<std::size_t> idx;
  if (y.size() <= 2 * buckets) {
    for (std::size_t i = 0; i < y.size(); ++i) idx.push_back(i);
    return idx;
  }
  for (std::size_t b = 0; b < buckets; ++b) {
    const std::size_t lo = b * y.size() / buckets, hi = (b + 1) * y.size() / buckets;
    std::size_t imin = lo, imax = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      if (y[i] < y[imin]) imin = i;
      if (y[i] > y[imax]) imax = i;
    }
    idx.push_back(std::min(imin, imax));
    if (imin != imax) idx.push_back(std::max(imin, imax));
  }
  return idx;
}

struct Panel {
  std::string label;
  std::vector<double> x, y;
};

inline void draw_panel(std::ostringstream& os, const Panel& p, double top, double width, double height,
                       const std::string& xlabel) {
  const double left = 70, right = width - 20, bottom = top + height - 30, ptop = top + 10;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    if (!std::isfinite(p.x[i]) || !std::isfinite(p.y[i])) continue;
    xmin = std::min(xmin, p.x[i]);
    xmax = std::max(xmax, p.x[i]);
    ymin = std::min(ymin, p.y[i]);
    ymax = std::max(ymax, p.y[i]);
  }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto X = [&](double v) { return left + (v - xmin) / (xmax - xmin) * (right - left); };
  auto Y = [&](double v) { return bottom - (v - ymin) / (ymax - ymin) * (bottom - ptop); };

  os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(ptop) << "\" width=\"" << fmt(right - left) << "\" height=\""
     << fmt(bottom - ptop) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  if (ymin < 0 && ymax > 0)
    os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(Y(0)) << "\" x2=\"" << fmt(right) << "\" y2=\"" << fmt(Y(0))
       << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(ptop + 10) << "\" text-anchor=\"end\">" << tick(ymax)
     << "</text>\n";
  os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(bottom) << "\" text-anchor=\"end\">" << tick(ymin)
     << "</text>\n";
  os << "<text x=\"" << fmt(left) << "\" y=\"" << fmt(bottom + 16) << "\">" << tick(xmin) << "</text>\n";
  os << "<text x=\"" << fmt(right) << "\" y=\"" << fmt(bottom + 16) << "\" text-anchor=\"end\">" << tick(xmax)
     << "</text>\n";
  os << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(bottom + 16) << "\" text-anchor=\"middle\">"
     << xlabel << "</text>\n";
  os << "<text x=\"12\" y=\"" << fmt((ptop + bottom) / 2) << "\">" << p.label << "</text>\n";

  os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\" points=\"";
  bool first = true;
  for (std::size_t i : decimate(p.y, 1000)) {
    if (!std::isfinite(p.x[i]) || !std::isfinite(p.y[i])) continue;
    os << (first ? "" : " ") << fmt(X(p.x[i])) << ',' << fmt(Y(p.y[i]));
    first = false;
  }
  os << "\"/>\n";
}

}  // namespace detail

/// Renders a parsed CSV table as a standalone SVG document.
inline std::string render_svg(const io::Table& t, Style style, const std::string& title = {}) {
  if (t.rows.empty()) throw ParameterError("plot: CSV has no data rows");
  std::vector<detail::Panel> panels;
  std::string xlabel;
  if (style == Style::curve) {
    if (!is_estimate_table(t)) throw ParameterError("plot: style 'curve' needs an 'abscissa,value' CSV");
    panels.push_back({"value", t.column(0), t.column(1)});
    xlabel = "abscissa";
  } else {
    if (!is_trajectory_table(t)) throw ParameterError("plot: styles 'states' and 'all' need a trajectory CSV");
    const auto time = t.column(0);
    for (std::size_t j = 1; j < t.header.size(); ++j) {
      const std::string& h = t.header[j];
      const bool state = h.size() > 1 && h[0] == 'x';
      if (style == Style::all || state || h == "u") panels.push_back({h, time, t.column(j)});
    }
    if (panels.empty()) throw ParameterError("plot: trajectory CSV has no state columns");
    xlabel = "t";
  }
  const double width = 800, panel_h = 200, head = title.empty() ? 0 : 30;
  const double height = head + panel_h * static_cast<double>(panels.size());
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(width) << "\" height=\""
     << detail::fmt(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) os << "<text x=\"400.00\" y=\"20.00\" text-anchor=\"middle\">" << title << "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    detail::draw_panel(os, panels[i], head + panel_h * static_cast<double>(i), width, panel_h, xlabel);
  os << "</svg>\n";
  return os.str();
}

/// Reads `csv_path`, renders it and writes `svg_path`. Nothing is written on error.
inline void plot_file(const std::string& csv_path, const std::string& svg_path, std::optional<Style> style = {}) {
  const io::Table t = io::parse_csv(io::read_text(csv_path));
  const std::string svg = render_svg(t, style ? *style : default_style(t));
  io::write_text(svg_path, svg);
}

}  // namespace stabkit::plot

#endif  // STABKIT_PLOT_HPP
