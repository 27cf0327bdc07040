#pragma once

#include <string>
#include <vector>

namespace varcast::harness {

struct ChartSeries {
  std::string label;
  std::vector<double> values;
};

/// Minimal static SVG line chart: one polyline per series over a shared
/// x index, auto-scaled y axis, legend in the top-left corner.
std::string render_line_chart(const std::string& title,
                              const std::vector<ChartSeries>& series);

}  // namespace varcast::harness
