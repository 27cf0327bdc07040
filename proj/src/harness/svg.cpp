#include "varcast/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "varcast/errors.hpp"

namespace varcast::harness {

namespace {

const char* kPalette[] = {"#222222", "#d62728", "#1f77b4",
                          "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_line_chart(const std::string& title,
                              const std::vector<ChartSeries>& series) {
  if (series.empty()) throw DataError("render_line_chart: no series");
  const double width = 900, height = 420;
  const double left = 60, right = 20, top = 40, bottom = 30;

  std::size_t n = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (n < 2) throw DataError("render_line_chart: need at least 2 points");
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto to_x = [&](std::size_t i, std::size_t len) {
    return left + (width - left - right) * static_cast<double>(i) /
                      static_cast<double>(len - 1);
  };
  auto to_y = [&](double v) {
    return top + (height - top - bottom) * (hi - v) / (hi - lo);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(width / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + title + "</text>\n";

  // y gridlines and labels
  for (int g = 0; g <= 4; ++g) {
    double v = lo + (hi - lo) * g / 4.0;
    double y = to_y(v);
    svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y) + "\" x2=\"" +
           fmt(width - right) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"#dddddd\"/>\n";
    char lbl[32];
    std::snprintf(lbl, sizeof(lbl), "%.4g", v);
    svg += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + lbl + "</text>\n";
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.values.size() < 2) continue;
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))];
    std::string pts;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      pts += fmt(to_x(i, s.values.size())) + "," + fmt(to_y(s.values[i])) +
             " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
    double ly = top + 14.0 * static_cast<double>(si);
    svg += "<line x1=\"" + fmt(left + 8) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
           fmt(left + 28) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(left + 34) + "\" y=\"" + fmt(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + s.label +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace varcast::harness
